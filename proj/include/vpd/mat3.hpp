#pragma once

#include <array>
#include <cmath>

#include "vpd/camera.hpp"

namespace vpd {

/// Column-major 3x3 matrix, just enough for the frame operations used here.
struct Mat3 {
    // m[c] is column c.
    std::array<Vec3, 3> col{};

    static Mat3 from_columns(const Vec3& a, const Vec3& b, const Vec3& c) { return {{a, b, c}}; }

    Vec3 operator*(const Vec3& v) const {
        return col[0] * v.x + col[1] * v.y + col[2] * v.z;
    }

    Mat3 operator*(const Mat3& o) const {
        return {{(*this) * o.col[0], (*this) * o.col[1], (*this) * o.col[2]}};
    }

    Mat3 transposed() const {
        return {{Vec3{col[0].x, col[1].x, col[2].x},
                 Vec3{col[0].y, col[1].y, col[2].y},
                 Vec3{col[0].z, col[1].z, col[2].z}}};
    }
};

struct SymEig3 {
    std::array<double, 3> values{};  // ascending
    Mat3 vectors;                    // columns are the matching eigenvectors
};

/// Cyclic Jacobi eigensolver for a symmetric 3x3 matrix. A handful of sweeps
/// reaches machine precision at this size.
SymEig3 sym_eig3(const Mat3& a);

/// Unit eigenvector for the smallest eigenvalue of a symmetric matrix.
Vec3 smallest_eigenvector(const Mat3& a);

/// Nearest orthonormal matrix in the Frobenius norm (the orthogonal factor of
/// the polar decomposition). Requires m nonsingular.
Mat3 nearest_orthonormal(const Mat3& m);

}  // namespace vpd
