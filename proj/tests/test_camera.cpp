#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vpd/camera.hpp"
#include "vpd/mat3.hpp"
#include "vpd/random.hpp"

using namespace vpd;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("lift_pixel basics") {
    CameraIntrinsics k(256.0, 64.0, 64.0, 128, 128);

    SUBCASE("principal point lifts to the optical axis") {
        Vec3 v = lift_pixel(64.0, 64.0, k);
        CHECK(v.x == doctest::Approx(0.0));
        CHECK(v.y == doctest::Approx(0.0));
        CHECK(v.z == doctest::Approx(1.0));
    }

    SUBCASE("one focal length to the right is a 45 degree ray") {
        CameraIntrinsics unit(1.0, 0.5, 0.5, 1, 1);
        Vec3 v = lift_pixel(1.5, 0.5, unit);
        CHECK(v.x == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
        CHECK(v.y == doctest::Approx(0.0));
        CHECK(v.z == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    }

    SUBCASE("independent arithmetic check") {
        Vec3 v = lift_pixel(100.0, 40.0, k);
        double ex = 100.0 - 64.0, ey = 40.0 - 64.0, ez = 256.0;
        double n = std::sqrt(ex * ex + ey * ey + ez * ez);
        CHECK(v.x == doctest::Approx(ex / n).epsilon(1e-14));
        CHECK(v.y == doctest::Approx(ey / n).epsilon(1e-14));
        CHECK(v.z == doctest::Approx(ez / n).epsilon(1e-14));
    }

    SUBCASE("z is always positive") {
        Rng rng(7);
        for (int i = 0; i < 200; ++i) {
            Vec3 v = lift_pixel(rng.uniform(-500, 500), rng.uniform(-500, 500), k);
            CHECK(v.z > 0.0);
        }
    }
}

TEST_CASE("camera invariants are enforced") {
    CHECK_THROWS_AS(CameraIntrinsics(-1.0, 10, 10, 32, 32), InvalidArgument);
    CHECK_THROWS_AS(CameraIntrinsics(10.0, 64, 10, 32, 32), InvalidArgument);
}

TEST_CASE("sph_to_vec fixed points") {
    Vec3 a = sph_to_vec({0.0, 0.0});
    CHECK(a.x == doctest::Approx(0.0));
    CHECK(a.z == doctest::Approx(1.0));

    Vec3 b = sph_to_vec({kPi / 2, 0.0});
    CHECK(b.x == doctest::Approx(1.0));
    CHECK(b.z == doctest::Approx(0.0));

    Vec3 c = sph_to_vec({0.0, -kPi / 4});
    CHECK(c.y == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));
    CHECK(c.z == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("vec_to_sph conventions and round trip") {
    SUBCASE("optical axis") {
        SphericalCoord s = vec_to_sph({0, 0, 1});
        CHECK(s.azimuth == 0.0);
        CHECK(s.elevation == 0.0);
    }

    SUBCASE("pole convention") {
        SphericalCoord s = vec_to_sph({0, 1, 0});
        CHECK(s.azimuth == 0.0);
        CHECK(s.elevation == doctest::Approx(kPi / 2));
    }

    SUBCASE("round trip up to sign, random directions") {
        Rng rng(42);
        for (int i = 0; i < 2000; ++i) {
            Vec3 v = rng.unit_vector();
            if (std::abs(v.y) > 1.0 - 1e-9) continue;
            SphericalCoord s = vec_to_sph(v);
            CHECK(s.azimuth >= -kPi / 2);
            CHECK(s.azimuth < kPi);
            CHECK(std::abs(s.elevation) <= kPi / 2 + 1e-15);
            Vec3 back = sph_to_vec(s);
            CHECK(angular_distance(back, v) < 1e-9);
        }
    }
}

TEST_CASE("canonicalize") {
    SUBCASE("flips the lower hemisphere") {
        Vec3 v = canonicalize({0, 0, -1});
        CHECK(v.z == 1.0);
    }
    SUBCASE("fixed point on the upper hemisphere") {
        Vec3 v = canonicalize({0, 0, 1});
        CHECK(v.z == 1.0);
    }
    SUBCASE("z = 0 ties break by y") {
        Vec3 v = canonicalize({0, -1, 0});
        CHECK(v.y == 1.0);
    }
    SUBCASE("z = y = 0 ties break by x") {
        Vec3 v = canonicalize({-1, 0, 0});
        CHECK(v.x == 1.0);
    }
    SUBCASE("antipodal pair maps to the same representative") {
        Rng rng(3);
        for (int i = 0; i < 500; ++i) {
            Vec3 v = rng.unit_vector();
            Vec3 a = canonicalize(v), b = canonicalize(-v);
            CHECK(a.x == b.x);
            CHECK(a.y == b.y);
            CHECK(a.z == b.z);
            CHECK(is_canonical(a));
            Vec3 again = canonicalize(a);
            CHECK(again == a);
        }
    }
}

TEST_CASE("angular_distance is precise for tiny angles") {
    Vec3 a{0, 0, 1};
    double eps = 3e-8;
    Vec3 b = Vec3{eps, 0, 1}.normalized();
    CHECK(angular_distance(a, b) == doctest::Approx(eps).epsilon(1e-6));
    CHECK(angular_distance(a, -b) == doctest::Approx(eps).epsilon(1e-6));
    CHECK(angular_distance(a, a) == 0.0);
}

TEST_CASE("nearest orthonormal frame") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        // Perturb a random rotation and snap back.
        Vec3 a = rng.unit_vector();
        Vec3 tmp = rng.unit_vector();
        while (std::abs(a.dot(tmp)) > 0.9) tmp = rng.unit_vector();
        Vec3 c = a.cross(tmp).normalized();
        Vec3 b = c.cross(a).normalized();

        auto perturb = [&](const Vec3& v) {
            return (v + Vec3{rng.normal(0.01), rng.normal(0.01), rng.normal(0.01)}).normalized();
        };
        Mat3 noisy = Mat3::from_columns(perturb(a), perturb(b), perturb(c));
        Mat3 r = nearest_orthonormal(noisy);

        for (int i = 0; i < 3; ++i) {
            CHECK(r.col[i].norm() == doctest::Approx(1.0).epsilon(1e-10));
            for (int j = i + 1; j < 3; ++j)
                CHECK(std::abs(r.col[i].dot(r.col[j])) < 1e-10);
        }
        // Snapping a frame that is already orthonormal is the identity.
        Mat3 again = nearest_orthonormal(r);
        for (int i = 0; i < 3; ++i) CHECK((again.col[i] - r.col[i]).norm() < 1e-9);
    }
}

TEST_CASE("smallest eigenvector recovers a plane normal") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Vec3 n = rng.unit_vector();
        // Covariance of many vectors orthogonal to n.
        Mat3 cov{};
        for (int i = 0; i < 40; ++i) {
            Vec3 r = rng.unit_vector();
            Vec3 t = (r - n * r.dot(n)).normalized();
            cov.col[0] = cov.col[0] + t * t.x;
            cov.col[1] = cov.col[1] + t * t.y;
            cov.col[2] = cov.col[2] + t * t.z;
        }
        Vec3 v = smallest_eigenvector(cov);
        CHECK(angular_distance(v, n) < 1e-8);
    }
}
