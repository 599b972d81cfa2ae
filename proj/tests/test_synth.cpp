#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vpd/camera.hpp"
#include "vpd/synth.hpp"

using namespace vpd;

namespace {

SceneSpec base_spec(std::uint64_t seed, bool manhattan, int n_dirs) {
    SceneSpec spec;
    spec.seed = seed;
    spec.manhattan = manhattan;
    spec.n_directions = n_dirs;
    spec.lines_per_direction = 7;
    spec.intrinsics = CameraIntrinsics::centered(2.1 * 256, 256, 256);
    return spec;
}

}  // namespace

TEST_CASE("generation is bit-identical per seed") {
    SceneSpec spec = base_spec(77, true, 3);
    Scene a = generate_scene(spec);
    Scene b = generate_scene(spec);
    CHECK(a.image.values == b.image.values);
    CHECK(a.truth.segments.size() == b.truth.segments.size());
    for (std::size_t i = 0; i < a.truth.directions.size(); ++i)
        CHECK(a.truth.directions[i] == b.truth.directions[i]);

    Scene c = generate_scene(base_spec(78, true, 3));
    CHECK(a.image.values != c.image.values);
}

TEST_CASE("manhattan truth is orthonormal") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 9ull}) {
        Scene s = generate_scene(base_spec(seed, true, 3));
        REQUIRE(s.truth.directions.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(s.truth.directions[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
            for (int j = i + 1; j < 3; ++j)
                CHECK(std::abs(s.truth.directions[i].dot(s.truth.directions[j])) < 1e-9);
        }
    }
}

TEST_CASE("noiseless segments are exactly incident to their family direction") {
    Scene s = generate_scene(base_spec(5, true, 3));
    const CameraIntrinsics& k = s.truth.directions.empty() ? CameraIntrinsics()
                                                           : base_spec(5, true, 3).intrinsics;
    for (const Segment& seg : s.truth.segments) {
        REQUIRE(seg.family >= 0);
        Vec3 a = lift_pixel(seg.x0, seg.y0, k);
        Vec3 b = lift_pixel(seg.x1, seg.y1, k);
        Vec3 n = a.cross(b).normalized();
        CHECK(std::abs(n.dot(s.truth.directions[seg.family])) < 1e-6);
    }
}

TEST_CASE("non-manhattan scenes have well-separated directions") {
    Scene s = generate_scene(base_spec(21, false, 6));
    REQUIRE(s.truth.directions.size() == 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j)
            CHECK(angular_distance(s.truth.directions[i], s.truth.directions[j]) >
                  0.26 - 1e-9);
}

TEST_CASE("oracle recovers the exact directions on noiseless scenes") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
        SceneSpec spec = base_spec(seed, false, 5);
        Scene s = generate_scene(spec);
        std::vector<Vec3> got = oracle_vps(s.truth, spec.intrinsics);
        REQUIRE(got.size() == 5);
        for (std::size_t f = 0; f < got.size(); ++f)
            CHECK(angular_distance(got[f], s.truth.directions[f]) < 1e-9);
    }
}

TEST_CASE("oracle error grows monotonically with jitter") {
    auto mean_oracle_error = [](double sigma) {
        double total = 0.0;
        int count = 0;
        for (std::uint64_t seed = 100; seed < 130; ++seed) {
            SceneSpec spec = base_spec(seed, true, 3);
            spec.jitter_sigma = sigma;
            Scene s = generate_scene(spec);
            std::vector<Vec3> got = oracle_vps(s.truth, spec.intrinsics);
            for (std::size_t f = 0; f < got.size(); ++f) {
                total += angular_distance(got[f], s.truth.directions[f]);
                ++count;
            }
        }
        return total / count;
    };
    double e0 = mean_oracle_error(0.0);
    double e1 = mean_oracle_error(0.5);
    double e2 = mean_oracle_error(1.0);
    double e3 = mean_oracle_error(2.0);
    CHECK(e0 < e1);
    CHECK(e1 < e2);
    CHECK(e2 < e3);
    CHECK(e0 < 1e-9);
}

TEST_CASE("single-segment family degenerates") {
    SceneTruth truth;
    truth.directions = {canonicalize({0, 0, 1})};
    truth.segments = {{0, 10, 10, 100, 100}};
    CHECK_THROWS_AS(oracle_vps(truth, CameraIntrinsics::centered(100, 128, 128)),
                    DegenerateFamily);
}

TEST_CASE("invalid specs are rejected") {
    SceneSpec spec = base_spec(1, true, 3);
    spec.n_directions = 4;  // manhattan forces 3
    CHECK_THROWS_AS(generate_scene(spec), InvalidArgument);
    SceneSpec spec2 = base_spec(1, false, 9);
    CHECK_THROWS_AS(generate_scene(spec2), InvalidArgument);
}

TEST_CASE("binary raster marks only the line corridor") {
    SceneSpec spec = base_spec(31, true, 3);
    spec.raster = RasterMode::binary;
    Scene s = generate_scene(spec);
    for (float v : s.image.values) CHECK((v == 0.0f || v == 1.0f));
}
