#pragma once

#include <array>
#include <cmath>

namespace rdbench::proxy {

using Block8 = std::array<double, 64>;  // row-major 8x8

namespace detail {

// Orthonormal DCT-II basis matrix: C[u][n] = a(u) cos((2n+1) u pi / 16),
// a(0) = sqrt(1/8), a(u>0) = 1/2.
inline const std::array<std::array<double, 8>, 8>& dct_basis() {
    static const auto c = [] {
        std::array<std::array<double, 8>, 8> m{};
        const double pi = std::acos(-1.0);
        for (int u = 0; u < 8; ++u) {
            double a = (u == 0) ? std::sqrt(1.0 / 8.0) : 0.5;
            for (int n = 0; n < 8; ++n)
                m[u][n] = a * std::cos((2.0 * n + 1.0) * u * pi / 16.0);
        }
        return m;
    }();
    return c;
}

}  // namespace detail

// Forward orthonormal 2-D DCT-II of a level-shifted 8x8 block: Y = C X C^T.
inline Block8 dct8x8(const Block8& block) {
    const auto& c = detail::dct_basis();
    std::array<std::array<double, 8>, 8> tmp{};  // C X
    for (int u = 0; u < 8; ++u)
        for (int n = 0; n < 8; ++n) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) s += c[u][k] * block[k * 8 + n];
            tmp[u][n] = s;
        }
    Block8 out{};
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) s += tmp[u][k] * c[v][k];
            out[u * 8 + v] = s;
        }
    return out;
}

// Inverse of dct8x8: X = C^T Y C. Round-trips within 1e-9 (orthonormality).
inline Block8 idct8x8(const Block8& coeffs) {
    const auto& c = detail::dct_basis();
    std::array<std::array<double, 8>, 8> tmp{};  // C^T Y
    for (int n = 0; n < 8; ++n)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) s += c[k][n] * coeffs[k * 8 + v];
            tmp[n][v] = s;
        }
    Block8 out{};
    for (int n = 0; n < 8; ++n)
        for (int m = 0; m < 8; ++m) {
            double s = 0.0;
            for (int k = 0; k < 8; ++k) s += tmp[n][k] * c[k][m];
            out[n * 8 + m] = s;
        }
    return out;
}

}  // namespace rdbench::proxy
