#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "rdbench/errors.hpp"

namespace rdbench::stats {

// Kahan-compensated sum. Used for every reduction in this header so that
// 800-measurement calibration sums do not depend on accumulation order
// at double precision.
inline double sum(std::span<const double> xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw invalid_input_error("mean: empty input");
    return sum(xs) / static_cast<double>(xs.size());
}

// Population variance (divide by n).
inline double variance(std::span<const double> xs) {
    double m = mean(xs);
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double d = (x - m) * (x - m) - c;
        double t = s + d;
        c = (t - s) - d;
        s = t;
    }
    return s / static_cast<double>(xs.size());
}

inline double stddev(std::span<const double> xs) { return std::sqrt(variance(xs)); }

// Interpolated median: average of the two middle order statistics for even n.
inline double median(std::span<const double> xs) {
    if (xs.empty()) throw invalid_input_error("median: empty input");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Lower-middle median: v[(n-1)/2]; equals the interpolated median for odd n.
inline double median_lower(std::span<const double> xs) {
    if (xs.empty()) throw invalid_input_error("median: empty input");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

// Average ranks, 1-based; ties share the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> xs) {
    std::size_t n = xs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        // positions i..j (0-based) share rank mean of i+1..j+1
        double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline void require_paired(std::span<const double> xs, std::span<const double> ys,
                           const char* what) {
    if (xs.size() != ys.size())
        throw invalid_input_error(std::string(what) + ": length mismatch");
    if (xs.size() < 2)
        throw invalid_input_error(std::string(what) + ": need at least 2 samples");
}

// Product-moment correlation. Throws undefined_correlation_error when either
// input has zero variance.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    require_paired(xs, ys, "pearson");
    double mx = mean(xs), my = mean(ys);
    double sxy = 0.0, cxy = 0.0;
    double sxx = 0.0, cxx = 0.0;
    double syy = 0.0, cyy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        auto add = [](double& s, double& c, double v) {
            double y = v - c;
            double t = s + y;
            c = (t - s) - y;
            s = t;
        };
        add(sxy, cxy, dx * dy);
        add(sxx, cxx, dx * dx);
        add(syy, cyy, dy * dy);
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw undefined_correlation_error("pearson: zero variance input");
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

// Spearman rank correlation with average ranks for ties.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
    require_paired(xs, ys, "spearman");
    std::vector<double> rx = average_ranks(xs);
    std::vector<double> ry = average_ranks(ys);
    try {
        return pearson(rx, ry);
    } catch (const undefined_correlation_error&) {
        throw undefined_correlation_error("spearman: zero rank variance");
    }
}

struct AffineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Ordinary least squares y = slope*x + intercept.
inline AffineFit affine_fit(std::span<const double> xs, std::span<const double> ys) {
    require_paired(xs, ys, "affine_fit");
    double mx = mean(xs), my = mean(ys);
    double sxy = 0.0, cxy = 0.0;
    double sxx = 0.0, cxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        double v = dx * dy - cxy;
        double t = sxy + v;
        cxy = (t - sxy) - v;
        sxy = t;
        v = dx * dx - cxx;
        t = sxx + v;
        cxx = (t - sxx) - v;
        sxx = t;
    }
    if (sxx <= 0.0) throw degenerate_fit_error("affine_fit: zero variance in x");
    AffineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

// Mean absolute residual of ys against slope*xs + intercept.
inline double mae_after_affine(std::span<const double> xs, std::span<const double> ys,
                               double slope, double intercept) {
    if (xs.size() != ys.size())
        throw invalid_input_error("mae_after_affine: length mismatch");
    if (xs.empty()) throw invalid_input_error("mae_after_affine: empty input");
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double v = std::abs(ys[i] - (slope * xs[i] + intercept)) - c;
        double t = s + v;
        c = (t - s) - v;
        s = t;
    }
    return s / static_cast<double>(xs.size());
}

struct CorrelationReport {
    double spearman_rho = 0.0;  // in [-1, 1]
    double pearson_r = 0.0;     // in [-1, 1]
    double mae = 0.0;           // same units as the target
    std::size_t n = 0;
};

}  // namespace rdbench::stats
