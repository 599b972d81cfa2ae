#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vpd/edges.hpp"
#include "vpd/image.hpp"
#include "vpd/random.hpp"

using namespace vpd;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("pgm round trip and constant white") {
    GrayImage img(9, 5, 1.0f);
    auto path = temp_file("vpd_const.pgm");
    save_pgm(img, path.string());
    GrayImage back = load_image(path.string());
    CHECK(back.width == 9);
    CHECK(back.height == 5);
    for (float v : back.values) CHECK(v == 1.0f);
    std::filesystem::remove(path);
}

TEST_CASE("ppm loads through the standard luma weights") {
    auto path = temp_file("vpd_rgb.ppm");
    {
        std::ofstream out(path, std::ios::binary);
        out << "P6\n2 1\n255\n";
        unsigned char px[6] = {255, 0, 0, 0, 255, 0};
        out.write(reinterpret_cast<char*>(px), 6);
    }
    GrayImage img = load_image(path.string());
    CHECK(img.at(0, 0) == doctest::Approx(0.299).epsilon(1e-6));
    CHECK(img.at(1, 0) == doctest::Approx(0.587).epsilon(1e-6));
    std::filesystem::remove(path);
}

TEST_CASE("io errors") {
    CHECK_THROWS_AS(load_image("/nonexistent/vpd.pgm"), IoError);
    auto path = temp_file("vpd_bad.bin");
    {
        std::ofstream out(path, std::ios::binary);
        out << "XYZW garbage";
    }
    CHECK_THROWS_AS(load_image(path.string()), FormatError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n4 4\n255\nab";  // truncated pixel data
    }
    CHECK_THROWS_AS(load_image(path.string()), FormatError);
    std::filesystem::remove(path);
}

TEST_CASE("resize: constant image stays constant") {
    GrayImage img(512, 512, 0.375f);
    ResizedImage r = resize_to_grid(img, 128);
    CHECK(r.scale == doctest::Approx(0.25));
    CHECK(r.image.width == 128);
    for (float v : r.image.values) CHECK(v == doctest::Approx(0.375).epsilon(1e-6));
}

TEST_CASE("resize: identity at matching size") {
    Rng rng(4);
    GrayImage img(128, 128);
    for (float& v : img.values) v = static_cast<float>(rng.uniform());
    ResizedImage r = resize_to_grid(img, 128);
    CHECK(r.scale == 1.0);
    CHECK(r.image.values == img.values);
}

TEST_CASE("resize: checkerboard downscale equals block means") {
    GrayImage img(256, 256);
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 256; ++x) img.at(x, y) = ((x + y) % 2 == 0) ? 1.0f : 0.0f;
    ResizedImage r = resize_to_grid(img, 128);
    // Brute-force 2x2 block averaging oracle.
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x) {
            float mean = (img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) +
                          img.at(2 * x, 2 * y + 1) + img.at(2 * x + 1, 2 * y + 1)) /
                         4.0f;
            CHECK(r.image.at(x, y) == doctest::Approx(mean).epsilon(1e-6));
        }
}

TEST_CASE("resize: non-square input is isotropically scaled and padded") {
    GrayImage img(200, 100, 1.0f);
    ResizedImage r = resize_to_grid(img, 100);
    CHECK(r.scale == doctest::Approx(0.5));
    CHECK(r.image.at(10, 10) == doctest::Approx(1.0));
    CHECK(r.image.at(10, 80) == 0.0f);  // padded region
}

TEST_CASE("edges: constant image has no edges") {
    GrayImage img(64, 64, 0.7f);
    EdgeMap e = detect_edges(img);
    for (float v : e.values) CHECK(v == 0.0f);
}

TEST_CASE("edges: vertical step gives a single one-pixel column") {
    GrayImage img(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 32; x < 64; ++x) img.at(x, y) = 1.0f;
    EdgeMap e = detect_edges(img);

    int interior_rows_with_one = 0;
    for (int y = 8; y < 56; ++y) {
        int count = 0;
        for (int x = 0; x < 64; ++x)
            if (e.at(x, y) > 0.0f) ++count;
        if (count == 1) ++interior_rows_with_one;
    }
    CHECK(interior_rows_with_one >= 44);  // NMS keeps a single ridge
}

TEST_CASE("edges: zero strength wherever the gradient is zero") {
    Rng rng(9);
    GrayImage img(64, 64, 0.5f);
    // A small textured patch in the middle; the rest is flat.
    for (int y = 24; y < 40; ++y)
        for (int x = 24; x < 40; ++x) img.at(x, y) = static_cast<float>(rng.uniform());
    EdgeMap e = detect_edges(img);
    // Far away from the patch the smoothed gradient is exactly flat.
    for (int y = 2; y < 12; ++y)
        for (int x = 2; x < 12; ++x) CHECK(e.at(x, y) == 0.0f);
}

TEST_CASE("edges: invariant to affine intensity changes") {
    Rng rng(10);
    GrayImage img(64, 64);
    for (float& v : img.values) v = static_cast<float>(rng.uniform(0.1, 0.6));
    GrayImage scaled(64, 64);
    for (std::size_t i = 0; i < img.values.size(); ++i)
        scaled.values[i] = 0.5f * img.values[i] + 0.25f;  // exact in floats

    EdgeMap a = detect_edges(img);
    EdgeMap b = detect_edges(scaled);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK((a.values[i] > 0.0f) == (b.values[i] > 0.0f));
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-4));
    }
}
