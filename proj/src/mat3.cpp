#include "vpd/mat3.hpp"

#include <algorithm>

#include "vpd/error.hpp"

namespace vpd {

namespace {

double& at(Mat3& m, int r, int c) {
    Vec3& v = m.col[c];
    return r == 0 ? v.x : (r == 1 ? v.y : v.z);
}

}  // namespace

SymEig3 sym_eig3(const Mat3& a_in) {
    Mat3 a = a_in;
    Mat3 v = Mat3::from_columns({1, 0, 0}, {0, 1, 0}, {0, 0, 1});

    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) off += at(a, p, q) * at(a, p, q);
        if (off < 1e-30) break;

        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                double apq = at(a, p, q);
                if (apq == 0.0) continue;
                double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int r = 0; r < 3; ++r) {
                    double arp = at(a, r, p), arq = at(a, r, q);
                    at(a, r, p) = c * arp - s * arq;
                    at(a, r, q) = s * arp + c * arq;
                }
                for (int r = 0; r < 3; ++r) {
                    double apr = at(a, p, r), aqr = at(a, q, r);
                    at(a, p, r) = c * apr - s * aqr;
                    at(a, q, r) = s * apr + c * aqr;
                }
                for (int r = 0; r < 3; ++r) {
                    double vrp = at(v, r, p), vrq = at(v, r, q);
                    at(v, r, p) = c * vrp - s * vrq;
                    at(v, r, q) = s * vrp + c * vrq;
                }
            }
        }
    }

    std::array<int, 3> order{0, 1, 2};
    std::array<double, 3> diag{at(a, 0, 0), at(a, 1, 1), at(a, 2, 2)};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return diag[i] < diag[j]; });

    SymEig3 out;
    for (int i = 0; i < 3; ++i) {
        out.values[i] = diag[order[i]];
        out.vectors.col[i] = v.col[order[i]].normalized();
    }
    return out;
}

Vec3 smallest_eigenvector(const Mat3& a) { return sym_eig3(a).vectors.col[0]; }

Mat3 nearest_orthonormal(const Mat3& m) {
    // R = M (M^T M)^{-1/2} via the eigendecomposition of M^T M.
    SymEig3 e = sym_eig3(m.transposed() * m);
    if (e.values[0] <= 1e-24) throw InvalidArgument("nearest_orthonormal: singular frame");
    Mat3 inv_sqrt{};
    for (int i = 0; i < 3; ++i) {
        double s = 1.0 / std::sqrt(e.values[i]);
        const Vec3& u = e.vectors.col[i];
        inv_sqrt.col[0] = inv_sqrt.col[0] + u * (s * u.x);
        inv_sqrt.col[1] = inv_sqrt.col[1] + u * (s * u.y);
        inv_sqrt.col[2] = inv_sqrt.col[2] + u * (s * u.z);
    }
    return m * inv_sqrt;
}

}  // namespace vpd
