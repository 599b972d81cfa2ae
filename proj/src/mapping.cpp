#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "vpd/mapping.hpp"
#include "vpd/parallel.hpp"

namespace vpd {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr char kMagic[4] = {'V', 'P', 'M', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

struct ByteSink {
    std::vector<std::uint8_t> bytes;

    template <typename T>
    void put(const T& v) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
        bytes.insert(bytes.end(), p, p + sizeof(T));
    }
    void put_raw(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        bytes.insert(bytes.end(), p, p + n);
    }
};

// Unit vector in the plane orthogonal to n (the circle's own basis).
Vec3 circle_basis_u(const Vec3& n) {
    Vec3 seed = std::abs(n.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 u = seed - n * seed.dot(n);
    return u.normalized();
}

struct ByteSource {
    const std::uint8_t* p;
    const std::uint8_t* end;

    template <typename T>
    T get() {
        if (p + sizeof(T) > end) throw CorruptCache("mapping cache: truncated");
        T v;
        std::memcpy(&v, p, sizeof(T));
        p += sizeof(T);
        return v;
    }
    void get_raw(void* dst, std::size_t n) {
        if (p + n > end) throw CorruptCache("mapping cache: truncated");
        std::memcpy(dst, p, n);
        p += n;
    }
};

}  // namespace

std::uint64_t intrinsics_hash(const CameraIntrinsics& k) {
    double fields[3] = {k.focal, k.cx, k.cy};
    std::int32_t dims[2] = {k.width, k.height};
    std::uint64_t h = fnv1a64(fields, sizeof(fields));
    return fnv1a64(dims, sizeof(dims), h);
}

std::uint64_t MappingTable::config_hash() const {
    std::int32_t p[3] = {hough_params.n_rho, hough_params.n_theta, hough_params.grid_side};
    std::uint64_t h = fnv1a64(p, sizeof(p));
    h = fnv1a64(&lattice_id, sizeof(lattice_id), h);
    h = fnv1a64(&intrinsics_id, sizeof(intrinsics_id), h);
    h = fnv1a64(&m_samples, sizeof(m_samples), h);
    return h;
}

MappingTable build_mapping(const HoughParams& params, const SphereLattice& lattice,
                           const CameraIntrinsics& k, std::uint32_t m, unsigned jobs) {
    params.validate();
    if (m < 2) throw InvalidArgument("build_mapping: need m >= 2");
    if (lattice.points.empty()) throw InvalidArgument("build_mapping: empty lattice");
    if (jobs == 0) jobs = default_jobs();

    // Azimuth sample table over [-pi/2, pi), as sampled for the projection.
    std::vector<double> sin_a(m), cos_a(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        double alpha = -0.5 * kPi + 1.5 * kPi * (static_cast<double>(i) / m);
        sin_a[i] = std::sin(alpha);
        cos_a[i] = std::cos(alpha);
    }
    // Arc-length sample table. The azimuth chart races near a circle's
    // highest-|y| point (and degenerates entirely for circles through the
    // pole, where every azimuth maps to the pole), leaving coverage holes;
    // a uniform walk of the half circle in its own plane basis fills them.
    std::vector<double> sin_t(m), cos_t(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        double t = kPi * (static_cast<double>(i) / m);
        sin_t[i] = std::sin(t);
        cos_t[i] = std::cos(t);
    }

    const std::size_t n_bins = params.bin_count();
    std::vector<std::vector<std::uint32_t>> per_bin(n_bins);

    parallel_chunks(n_bins, jobs, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<std::uint32_t> ids;
        ids.reserve(2 * m);
        for (std::size_t bin = b; bin < e; ++bin) {
            int rho_idx = static_cast<int>(bin) / params.n_theta;
            int theta_idx = static_cast<int>(bin) % params.n_theta;
            GridLine line = bin_to_line(rho_idx, theta_idx, params);
            if (!line_in_grid(line, params)) continue;

            Vec3 n = line_normal(line, params, k);
            ids.clear();
            for (std::uint32_t i = 0; i < m; ++i) {
                Vec3 p = great_circle_point(sin_a[i], cos_a[i], n);
                ids.push_back(static_cast<std::uint32_t>(lattice.nearest(p)));
            }
            Vec3 u = circle_basis_u(n);
            Vec3 w = n.cross(u);
            for (std::uint32_t i = 0; i < m; ++i) {
                Vec3 p = canonicalize(u * cos_t[i] + w * sin_t[i]);
                ids.push_back(static_cast<std::uint32_t>(lattice.nearest(p)));
            }
            std::sort(ids.begin(), ids.end());
            ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
            per_bin[bin] = ids;
        }
    }, 256);

    MappingTable table;
    table.hough_params = params;
    table.lattice_id = lattice.content_hash();
    table.intrinsics_id = intrinsics_hash(k);
    table.lattice_n = static_cast<std::uint32_t>(lattice.size());
    table.lattice_k = static_cast<std::uint32_t>(lattice.k);
    table.m_samples = m;
    table.offsets.resize(n_bins + 1);
    table.offsets[0] = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < n_bins; ++i) {
        total += per_bin[i].size();
        table.offsets[i + 1] = static_cast<std::uint32_t>(total);
    }
    table.indices.reserve(total);
    for (const auto& v : per_bin) table.indices.insert(table.indices.end(), v.begin(), v.end());
    return table;
}

SphereField accumulate_field(const HoughGrid& grid, const MappingTable& table,
                             const SphereLattice& lattice, unsigned jobs) {
    if (!(grid.params == table.hough_params))
        throw ParamsMismatch("accumulate_field: grid params differ from mapping params");
    if (lattice.content_hash() != table.lattice_id)
        throw ParamsMismatch("accumulate_field: lattice differs from the one the mapping was built on");
    if (jobs == 0) jobs = default_jobs();

    const std::size_t n_bins = grid.votes.size();
    const std::size_t n_points = lattice.size();

    constexpr std::size_t kChunks = 64;
    std::vector<std::vector<double>> partial(kChunks);

    parallel_chunks(n_bins, jobs, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::vector<double>& acc = partial[c];
        acc.assign(n_points, 0.0);
        for (std::size_t bin = b; bin < e; ++bin) {
            double v = grid.votes[bin];
            if (v <= 0.0) continue;
            const std::uint32_t* ids = table.entries(bin);
            std::size_t cnt = table.entry_count(bin);
            for (std::size_t i = 0; i < cnt; ++i) acc[ids[i]] += v;
        }
    }, kChunks);

    SphereField field(lattice);
    for (const auto& acc : partial) {
        if (acc.empty()) continue;
        for (std::size_t i = 0; i < n_points; ++i) field.values[i] += acc[i];
    }
    return field;
}

SphereField accumulate_field_column_mean(const HoughGrid& grid, const MappingTable& table,
                                         const SphereLattice& lattice, unsigned jobs,
                                         std::vector<std::uint32_t>* counts) {
    if (!(grid.params == table.hough_params))
        throw ParamsMismatch("accumulate_field: grid params differ from mapping params");
    if (lattice.content_hash() != table.lattice_id)
        throw ParamsMismatch("accumulate_field: lattice differs from the one the mapping was built on");
    if (jobs == 0) jobs = default_jobs();

    const int n_rho = grid.params.n_rho;
    const int n_theta = grid.params.n_theta;
    const std::size_t n_points = lattice.size();

    constexpr std::size_t kChunks = 32;
    std::vector<std::vector<double>> partial(kChunks);
    std::vector<std::vector<std::uint32_t>> partial_counts(kChunks);

    parallel_chunks(static_cast<std::size_t>(n_theta), jobs,
                    [&](std::size_t c, std::size_t jb, std::size_t je) {
                        std::vector<double>& acc = partial[c];
                        acc.assign(n_points, 0.0);
                        std::vector<std::uint32_t>& acc_cnt = partial_counts[c];
                        if (counts) acc_cnt.assign(n_points, 0);
                        std::vector<double> sum(n_points, 0.0);
                        std::vector<std::uint32_t> count(n_points, 0);
                        std::vector<std::uint32_t> touched;
                        for (std::size_t j = jb; j < je; ++j) {
                            touched.clear();
                            for (int k = 0; k < n_rho; ++k) {
                                std::size_t bin = grid.params.bin_index(k, static_cast<int>(j));
                                double v = grid.votes[bin];
                                if (v <= 0.0) continue;
                                const std::uint32_t* ids = table.entries(bin);
                                std::size_t cnt = table.entry_count(bin);
                                for (std::size_t i = 0; i < cnt; ++i) {
                                    std::uint32_t id = ids[i];
                                    if (count[id] == 0) touched.push_back(id);
                                    sum[id] += v;
                                    ++count[id];
                                }
                            }
                            for (std::uint32_t id : touched) {
                                acc[id] += sum[id] / count[id];
                                if (counts) acc_cnt[id] += count[id];
                                sum[id] = 0.0;
                                count[id] = 0;
                            }
                        }
                    },
                    kChunks);

    SphereField field(lattice);
    if (counts) counts->assign(n_points, 0);
    for (std::size_t c = 0; c < kChunks; ++c) {
        const auto& acc = partial[c];
        if (acc.empty()) continue;
        for (std::size_t i = 0; i < n_points; ++i) field.values[i] += acc[i];
        if (counts)
            for (std::size_t i = 0; i < n_points; ++i) (*counts)[i] += partial_counts[c][i];
    }
    return field;
}

void save_mapping(const MappingTable& table, const std::string& path) {
    ByteSink sink;
    sink.put_raw(kMagic, 4);
    sink.put<std::uint32_t>(kFormatVersion);
    sink.put<std::int32_t>(table.hough_params.n_rho);
    sink.put<std::int32_t>(table.hough_params.n_theta);
    sink.put<std::int32_t>(table.hough_params.grid_side);
    sink.put<std::uint64_t>(table.intrinsics_id);
    sink.put<std::uint32_t>(table.lattice_n);
    sink.put<std::uint32_t>(table.lattice_k);
    sink.put<std::uint64_t>(table.lattice_id);
    sink.put<std::uint32_t>(table.m_samples);

    const std::size_t n_bins = table.hough_params.bin_count();
    for (std::size_t i = 0; i < n_bins; ++i)
        sink.put<std::uint32_t>(static_cast<std::uint32_t>(table.entry_count(i)));
    sink.put_raw(table.indices.data(), table.indices.size() * sizeof(std::uint32_t));

    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, sink.bytes.data(), static_cast<uInt>(sink.bytes.size())));
    sink.put<std::uint32_t>(crc);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(sink.bytes.data()),
              static_cast<std::streamsize>(sink.bytes.size()));
    if (!out) throw IoError(path + ": write failed");
}

MappingTable load_mapping(const std::string& path, const HoughParams& expected_params,
                          std::uint64_t expected_lattice_id, std::uint64_t expected_intrinsics_id,
                          std::uint32_t expected_m) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() < 4 + sizeof(std::uint32_t) || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw CorruptCache(path + ": bad magic");
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, bytes.data() + bytes.size() - sizeof(std::uint32_t), sizeof(stored_crc));
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, bytes.data(), static_cast<uInt>(bytes.size() - sizeof(std::uint32_t))));
    if (crc != stored_crc) throw CorruptCache(path + ": checksum mismatch");

    ByteSource src{bytes.data() + 4, bytes.data() + bytes.size() - sizeof(std::uint32_t)};
    std::uint32_t version = src.get<std::uint32_t>();
    if (version != kFormatVersion) throw CorruptCache(path + ": unsupported format version");

    MappingTable table;
    table.hough_params.n_rho = src.get<std::int32_t>();
    table.hough_params.n_theta = src.get<std::int32_t>();
    table.hough_params.grid_side = src.get<std::int32_t>();
    table.intrinsics_id = src.get<std::uint64_t>();
    table.lattice_n = src.get<std::uint32_t>();
    table.lattice_k = src.get<std::uint32_t>();
    table.lattice_id = src.get<std::uint64_t>();
    table.m_samples = src.get<std::uint32_t>();
    table.hough_params.validate();

    if (!(table.hough_params == expected_params) || table.lattice_id != expected_lattice_id ||
        table.intrinsics_id != expected_intrinsics_id || table.m_samples != expected_m)
        throw CacheMismatch(path + ": cache was built for a different configuration");

    const std::size_t n_bins = table.hough_params.bin_count();
    table.offsets.resize(n_bins + 1);
    table.offsets[0] = 0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n_bins; ++i) {
        total += src.get<std::uint32_t>();
        if (total >= (1ull << 32)) throw CorruptCache(path + ": entry counts overflow");
        table.offsets[i + 1] = static_cast<std::uint32_t>(total);
    }
    table.indices.resize(total);
    src.get_raw(table.indices.data(), total * sizeof(std::uint32_t));
    if (src.p != src.end) throw CorruptCache(path + ": trailing bytes");
    for (std::uint32_t idx : table.indices)
        if (idx >= table.lattice_n) throw CorruptCache(path + ": lattice index out of range");
    return table;
}

}  // namespace vpd
