#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "vpd/error.hpp"

namespace vpd {

/// 3D direction/vector. Geometry throughout the toolkit is double precision.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }

    Vec3 normalized() const {
        double n = norm();
        return {x / n, y / n, z / n};
    }

    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Spherical chart: azimuth measured from the z-axis within the xz plane,
/// elevation measured from the xz plane toward the y-axis.
struct SphericalCoord {
    double azimuth = 0.0;    // radians, canonical range [-pi/2, pi)
    double elevation = 0.0;  // radians, [-pi/2, pi/2]
};

/// Pinhole camera: focal length and principal point in pixels.
struct CameraIntrinsics {
    double focal = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    CameraIntrinsics() = default;
    CameraIntrinsics(double focal_px, double cx_px, double cy_px, int w, int h)
        : focal(focal_px), cx(cx_px), cy(cy_px), width(w), height(h) {
        if (!(focal > 0.0)) throw InvalidArgument("camera: focal length must be positive");
        if (cx < 0.0 || cx > w || cy < 0.0 || cy > h)
            throw InvalidArgument("camera: principal point outside image");
    }

    /// Principal point defaulted to the image center.
    static CameraIntrinsics centered(double focal_px, int w, int h) {
        return CameraIntrinsics(focal_px, 0.5 * w, 0.5 * h, w, h);
    }

    /// Same camera after scaling the image by `s` (both axes).
    CameraIntrinsics scaled(double s, int new_w, int new_h) const {
        CameraIntrinsics k;
        k.focal = focal * s;
        k.cx = cx * s;
        k.cy = cy * s;
        k.width = new_w;
        k.height = new_h;
        return k;
    }
};

/// True for the canonical representative of the antipodal pair {v, -v}:
/// z > 0, or z = 0 and y > 0, or z = y = 0 and x > 0.
inline bool is_canonical(const Vec3& v) {
    if (v.z != 0.0) return v.z > 0.0;
    if (v.y != 0.0) return v.y > 0.0;
    return v.x > 0.0;
}

/// Returns v or -v, whichever is canonical. Idempotent; signed zeros are
/// normalized so canonical vectors compare and hash consistently.
inline Vec3 canonicalize(const Vec3& v) {
    Vec3 r = is_canonical(v) ? v : -v;
    return {r.x + 0.0, r.y + 0.0, r.z + 0.0};
}

/// Angular distance in radians under antipodal identification, in [0, pi/2].
/// Uses the chord formula, which keeps full precision near zero where
/// acos(|dot|) loses half the significant digits.
inline double angular_distance(const Vec3& a, const Vec3& b) {
    double dm = (a - b).norm();
    double dp = (a + b).norm();
    double chord = std::min(dm, dp);
    return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

/// Lift a pixel to the unit ray through it; z component is always positive.
inline Vec3 lift_pixel(double px, double py, const CameraIntrinsics& k) {
    return Vec3{px - k.cx, py - k.cy, k.focal}.normalized();
}

inline Vec3 sph_to_vec(const SphericalCoord& s) {
    double cb = std::cos(s.elevation);
    return {cb * std::sin(s.azimuth), std::sin(s.elevation), cb * std::cos(s.azimuth)};
}

/// Inverse chart. Azimuths outside [-pi/2, pi) are folded onto the antipode,
/// so sph_to_vec(vec_to_sph(v)) equals v up to sign. Poles return azimuth 0.
inline SphericalCoord vec_to_sph(const Vec3& v) {
    double y = std::clamp(v.y, -1.0, 1.0);
    if (std::abs(y) >= 1.0 || (v.x == 0.0 && v.z == 0.0))
        return {0.0, y >= 0.0 ? std::asin(1.0) : std::asin(-1.0)};
    double alpha = std::atan2(v.x, v.z);
    double beta = std::asin(y);
    constexpr double kPi = 3.14159265358979323846;
    if (alpha < -0.5 * kPi || alpha >= kPi) {
        alpha = std::atan2(-v.x, -v.z);
        beta = -beta;
    }
    return {alpha, beta};
}

}  // namespace vpd
