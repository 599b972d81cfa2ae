#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "vpd/image.hpp"

namespace vpd {

namespace {

constexpr float kLumaR = 0.299f;
constexpr float kLumaG = 0.587f;
constexpr float kLumaB = 0.114f;

// Reads one whitespace/comment-delimited token from a PNM header.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

int pnm_int(std::istream& in, const std::string& path, const char* what) {
    std::string tok = pnm_token(in);
    if (tok.empty()) throw FormatError(path + ": truncated header (" + what + ")");
    try {
        return std::stoi(tok);
    } catch (const std::exception&) {
        throw FormatError(path + ": bad header field '" + tok + "'");
    }
}

GrayImage load_pnm(std::ifstream& in, const std::string& path, bool color) {
    int w = pnm_int(in, path, "width");
    int h = pnm_int(in, path, "height");
    int maxval = pnm_int(in, path, "maxval");
    if (w <= 0 || h <= 0) throw FormatError(path + ": nonpositive dimensions");
    if (maxval <= 0 || maxval > 65535) throw FormatError(path + ": unsupported maxval");

    int channels = color ? 3 : 1;
    int bytes_per_sample = maxval > 255 ? 2 : 1;
    std::size_t n = static_cast<std::size_t>(w) * h * channels * bytes_per_sample;
    std::vector<std::uint8_t> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError(path + ": truncated pixel data");

    GrayImage img(w, h);
    const float inv = 1.0f / static_cast<float>(maxval);
    std::size_t s = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        float ch[3] = {0, 0, 0};
        for (int c = 0; c < channels; ++c) {
            unsigned v = raw[s++];
            if (bytes_per_sample == 2) v = (v << 8) | raw[s++];  // PNM 16-bit is big endian
            ch[c] = static_cast<float>(v) * inv;
        }
        img.values[i] = color ? kLumaR * ch[0] + kLumaG * ch[1] + kLumaB * ch[2] : ch[0];
    }
    return img;
}

struct PngCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

GrayImage load_png(const std::string& path) {
    PngCloser ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IoError(path + ": cannot open");

    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw Error("libpng: read struct allocation failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw Error("libpng: info struct allocation failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw FormatError(path + ": PNG decode failed");

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    png_uint_32 w = png_get_image_width(ctx.png, ctx.info);
    png_uint_32 h = png_get_image_height(ctx.png, ctx.info);
    int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
    int color_type = png_get_color_type(ctx.png, ctx.info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(ctx.png);
    if (bit_depth == 16) png_set_strip_16(ctx.png);
    png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    int channels = png_get_channels(ctx.png, ctx.info);
    if (channels != 1 && channels != 3) throw FormatError(path + ": unsupported PNG channel layout");

    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * channels);
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(ctx.png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x) {
            float v;
            if (channels == 1) {
                v = row[x] / 255.0f;
            } else {
                v = (kLumaR * row[3 * x] + kLumaG * row[3 * x + 1] + kLumaB * row[3 * x + 2]) / 255.0f;
            }
            img.values[static_cast<std::size_t>(y) * w + x] = v;
        }
    }
    return img;
}

}  // namespace

GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open");

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2) throw FormatError(path + ": file too short");

    if (magic[0] == 'P' && magic[1] == '5') return load_pnm(in, path, false);
    if (magic[0] == 'P' && magic[1] == '6') return load_pnm(in, path, true);
    if (magic[0] == '\x89' && magic[1] == 'P') {
        in.close();
        return load_png(path);
    }
    throw FormatError(path + ": unsupported format (want binary PGM/PPM or PNG)");
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> row(img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            float v = std::min(1.0f, std::max(0.0f, img.at(x, y)));
            row[x] = static_cast<std::uint8_t>(v * 255.0f + 0.5f);
        }
        out.write(reinterpret_cast<const char*>(row.data()), img.width);
    }
    if (!out) throw IoError(path + ": write failed");
}

void save_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.values.data()),
              static_cast<std::streamsize>(img.values.size()));
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace vpd
