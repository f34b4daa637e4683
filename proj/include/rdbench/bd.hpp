#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "rdbench/errors.hpp"
#include "rdbench/pchip.hpp"
#include "rdbench/rd_types.hpp"

namespace rdbench::bd {

// One Bjontegaard delta for one metric. Negative bd_rate_percent = bits saved
// at matched quality. quality_lo/quality_hi is the integration overlap.
// merged_points counts near-duplicate quality knots dropped by saturation
// merging across both curves; nonzero values mark the result as
// preprocessing-affected.
struct BDResult {
    MetricKind metric = MetricKind::vmaf;
    double bd_rate_percent = 0.0;
    double quality_lo = 0.0;
    double quality_hi = 0.0;
    int merged_points = 0;
};

// Points whose abscissae differ by less than this are merged before fitting
// (VMAF ceiling saturation produces near-duplicate quality values).
inline constexpr double kMergeEps = 1e-6;

// Default absolute tolerance on the mean-log integrand.
inline constexpr double kQuadTol = 1e-8;

namespace detail {

// Adaptive Simpson quadrature with absolute tolerance eps on the integral.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double fa, double m, double fm, double b, double fb,
                               double whole, double eps, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * eps, depth - 1) +
           adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * eps, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, fa, m, fm, b, fb, whole, eps, 48);
}

// Re-sorts (x, y) pairs by ascending x and merges near-duplicate abscissae,
// keeping the lower ordinate. Needs >= 2 surviving points. Returns the
// number of points merged away.
inline int prepare_axis(std::vector<double>& xs, std::vector<double>& ys,
                        const std::string& what) {
    std::vector<std::size_t> idx(xs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> sx, sy;
    sx.reserve(xs.size());
    sy.reserve(ys.size());
    for (std::size_t k : idx) {
        if (!sx.empty() && xs[k] - sx.back() < kMergeEps) {
            sy.back() = std::min(sy.back(), ys[k]);
        } else {
            sx.push_back(xs[k]);
            sy.push_back(ys[k]);
        }
    }
    if (sx.size() < 2)
        throw degenerate_curve_error(what + ": fewer than 2 distinct points after merging");
    int merged = static_cast<int>(xs.size() - sx.size());
    xs = std::move(sx);
    ys = std::move(sy);
    return merged;
}

// quality -> log10(bitrate), preprocessed and fitted.
inline Interpolant fit_lograte_of_quality(const RDCurve& curve, MetricKind metric,
                                          int* merged_points = nullptr) {
    curve.validate();
    std::vector<double> q, lr;
    q.reserve(curve.points.size());
    lr.reserve(curve.points.size());
    for (const RDPoint& p : curve.points) {
        q.push_back(p.score(metric));
        lr.push_back(std::log10(p.bitrate_kbps));
    }
    int merged = prepare_axis(q, lr, curve.sequence_id + "/" + curve.variant_id);
    if (merged_points) *merged_points += merged;
    return pchip_fit(q, lr);
}

// log10(bitrate) -> quality, preprocessed and fitted.
inline Interpolant fit_quality_of_lograte(const RDCurve& curve, MetricKind metric,
                                          int* merged_points = nullptr) {
    curve.validate();
    std::vector<double> lr, q;
    lr.reserve(curve.points.size());
    q.reserve(curve.points.size());
    for (const RDPoint& p : curve.points) {
        lr.push_back(std::log10(p.bitrate_kbps));
        q.push_back(p.score(metric));
    }
    int merged = prepare_axis(lr, q, curve.sequence_id + "/" + curve.variant_id);
    if (merged_points) *merged_points += merged;
    return pchip_fit(lr, q);
}

inline std::pair<double, double> overlap(const Interpolant& a, const Interpolant& b,
                                         const std::string& what) {
    double lo = std::max(a.min_x(), b.min_x());
    double hi = std::min(a.max_x(), b.max_x());
    if (!(lo < hi)) throw no_overlap_error(what + ": empty overlap");
    return {lo, hi};
}

}  // namespace detail

// Classical Bjontegaard rate delta: log10(bitrate) fitted as a PCHIP function
// of quality for each curve, the gap integrated over the shared quality range,
// result expressed as a percent bitrate difference at matched quality.
inline BDResult bd_rate(const RDCurve& baseline, const RDCurve& variant,
                        MetricKind metric, double quad_tol = kQuadTol) {
    int merged = 0;
    Interpolant fb = detail::fit_lograte_of_quality(baseline, metric, &merged);
    Interpolant fv = detail::fit_lograte_of_quality(variant, metric, &merged);
    auto [lo, hi] = detail::overlap(fb, fv, "bd_rate " + baseline.sequence_id);
    auto diff = [&](double q) { return fv(q) - fb(q); };
    double integral = detail::integrate(diff, lo, hi, quad_tol * (hi - lo));
    double d = integral / (hi - lo);
    BDResult r;
    r.metric = metric;
    r.bd_rate_percent = (std::pow(10.0, d) - 1.0) * 100.0;
    r.quality_lo = lo;
    r.quality_hi = hi;
    r.merged_points = merged;
    return r;
}

// Dual delta: mean quality difference (variant - baseline) over the shared
// log-rate range.
inline double bd_quality(const RDCurve& baseline, const RDCurve& variant,
                         MetricKind metric, double quad_tol = kQuadTol) {
    Interpolant fb = detail::fit_quality_of_lograte(baseline, metric);
    Interpolant fv = detail::fit_quality_of_lograte(variant, metric);
    auto [lo, hi] = detail::overlap(fb, fv, "bd_quality " + baseline.sequence_id);
    auto diff = [&](double x) { return fv(x) - fb(x); };
    double integral = detail::integrate(diff, lo, hi, quad_tol * (hi - lo));
    return integral / (hi - lo);
}

// Single-operating-point saving: percent bitrate reduction of variant vs
// baseline at their own (unmatched) quality points.
inline double operating_point_saving(const RDPoint& baseline, const RDPoint& variant) {
    if (baseline.bitrate_kbps <= 0.0 || variant.bitrate_kbps <= 0.0)
        throw invalid_input_error("operating_point_saving: non-positive bitrate");
    return (1.0 - variant.bitrate_kbps / baseline.bitrate_kbps) * 100.0;
}

}  // namespace rdbench::bd
