#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rdbench/errors.hpp"

namespace rdbench::bd {

// Piecewise cubic Hermite interpolant with Fritsch-Carlson shape-preserving
// derivative limiting. Monotone knot data yields a monotone interpolant on
// every sub-interval; knot values are reproduced exactly.
struct Interpolant {
    std::vector<double> knots_x;  // strictly increasing
    std::vector<double> knots_y;
    std::vector<double> derivs;   // one per knot

    double min_x() const { return knots_x.front(); }
    double max_x() const { return knots_x.back(); }

    // Evaluate at x. Outside the knot span the edge cubic is extended.
    double operator()(double x) const {
        std::size_t n = knots_x.size();
        std::size_t i;
        if (x <= knots_x.front()) {
            i = 0;
        } else if (x >= knots_x.back()) {
            i = n - 2;
        } else {
            i = static_cast<std::size_t>(
                    std::upper_bound(knots_x.begin(), knots_x.end(), x) -
                    knots_x.begin()) - 1;
        }
        double h = knots_x[i + 1] - knots_x[i];
        double t = (x - knots_x[i]) / h;
        double t2 = t * t, t3 = t2 * t;
        double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        double h10 = t3 - 2.0 * t2 + t;
        double h01 = -2.0 * t3 + 3.0 * t2;
        double h11 = t3 - t2;
        return h00 * knots_y[i] + h10 * h * derivs[i] + h01 * knots_y[i + 1] +
               h11 * h * derivs[i + 1];
    }
};

namespace detail {

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Shape-preserving one-sided endpoint derivative (three-point estimate,
// limited so the boundary segment cannot overshoot).
inline double pchip_edge(double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (sign(d) != sign(m0)) return 0.0;
    if (sign(m0) != sign(m1) && std::abs(d) > 3.0 * std::abs(m0)) return 3.0 * m0;
    return d;
}

}  // namespace detail

inline Interpolant pchip_fit(std::span<const double> xs, std::span<const double> ys) {
    std::size_t n = xs.size();
    if (n != ys.size()) throw invalid_input_error("pchip_fit: length mismatch");
    if (n < 2) throw invalid_input_error("pchip_fit: need at least 2 knots");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs[i] > xs[i - 1]))
            throw invalid_input_error("pchip_fit: knots_x not strictly increasing");

    Interpolant f;
    f.knots_x.assign(xs.begin(), xs.end());
    f.knots_y.assign(ys.begin(), ys.end());
    f.derivs.assign(n, 0.0);

    if (n == 2) {
        double m = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        f.derivs[0] = f.derivs[1] = m;
        return f;
    }

    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = xs[i + 1] - xs[i];
        m[i] = (ys[i + 1] - ys[i]) / h[i];
    }

    // Interior: weighted harmonic mean of the adjacent secant slopes when
    // they share a sign, zero otherwise (forces local extrema to be knots).
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (detail::sign(m[i - 1]) * detail::sign(m[i]) <= 0) {
            f.derivs[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            f.derivs[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
        }
    }
    f.derivs[0] = detail::pchip_edge(h[0], h[1], m[0], m[1]);
    f.derivs[n - 1] = detail::pchip_edge(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
    return f;
}

}  // namespace rdbench::bd
