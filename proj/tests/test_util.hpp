#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rdbench/rd_types.hpp"
#include "rdbench/yuv.hpp"

namespace testutil {

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo,
                                         double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// Natural-ish 4:2:0 patch: a smooth gradient plus band-limited texture plus
// grain, so DCT energy spans several octaves like camera content does.
inline rdbench::proxy::YuvPatch synthetic_patch(std::uint64_t seed, int w = 64, int h = 64) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double gx = 40.0 + 100.0 * u(rng), gy = 40.0 + 100.0 * u(rng);
    double fx = 0.02 + 0.25 * u(rng), fy = 0.02 + 0.25 * u(rng);
    double amp = 5.0 + 35.0 * u(rng);
    double grain = 1.0 + 9.0 * u(rng);
    std::normal_distribution<double> noise(0.0, grain);

    rdbench::proxy::YuvPatch p;
    p.width = w;
    p.height = h;
    p.y.resize(static_cast<std::size_t>(w) * h);
    p.cb.resize(static_cast<std::size_t>(w / 2) * (h / 2));
    p.cr.resize(p.cb.size());
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double v = 128.0 + gx * (c / double(w) - 0.5) + gy * (r / double(h) - 0.5) +
                       amp * std::sin(fx * c) * std::cos(fy * r) + noise(rng);
            p.y[static_cast<std::size_t>(r) * w + c] =
                static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
    for (std::size_t i = 0; i < p.cb.size(); ++i) {
        p.cb[i] = static_cast<std::uint8_t>(std::clamp(118.0 + noise(rng), 0.0, 255.0));
        p.cr[i] = static_cast<std::uint8_t>(std::clamp(138.0 + noise(rng), 0.0, 255.0));
    }
    return p;
}

// RD curve on the canonical QP grid from explicit bitrates and one metric.
inline rdbench::RDCurve make_curve(const std::string& seq, const std::string& var,
                                   std::vector<double> bitrates,
                                   std::vector<double> scores,
                                   rdbench::MetricKind metric = rdbench::MetricKind::vmaf) {
    rdbench::RDCurve c;
    c.sequence_id = seq;
    c.variant_id = var;
    for (std::size_t i = 0; i < bitrates.size(); ++i) {
        rdbench::RDPoint p;
        p.qp = rdbench::canonical_qp_grid[i];
        p.bitrate_kbps = bitrates[i];
        p.scores[metric] = scores[i];
        c.points.push_back(p);
    }
    return c;
}

// Random plausible RD curve pair generator: quality q(R) noisy-logarithmic,
// bitrates descending with qp.
struct CurvePair {
    rdbench::RDCurve baseline;
    rdbench::RDCurve variant;
};

inline CurvePair random_curve_pair(std::mt19937_64& rng, rdbench::MetricKind metric) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto gen = [&](double rate_scale, double q_off) {
        double r0 = 400.0 + 4000.0 * u(rng);
        double ratio = 2.0 + 1.2 * u(rng);
        double a = 10.0 + 20.0 * u(rng);
        double b = 14.0 + 10.0 * u(rng);
        std::vector<double> rates, scores;
        double r = r0 * rate_scale;
        for (int i = 3; i >= 0; --i) {
            double rate = r * std::pow(ratio, i);
            rates.push_back(rate);
            double q = a + b * std::log10(rate) + q_off + 0.8 * u(rng);
            scores.push_back(std::min(q, 99.5));
        }
        std::sort(rates.rbegin(), rates.rend());
        std::sort(scores.rbegin(), scores.rend());
        return std::pair{rates, scores};
    };
    auto [rb, qb] = gen(1.0, 0.0);
    auto [rv, qv] = gen(0.6 + 0.5 * u(rng), -1.0 + 3.0 * u(rng));
    CurvePair cp;
    cp.baseline = make_curve("synthetic", "baseline", rb, qb, metric);
    cp.variant = make_curve("synthetic", "variant", rv, qv, metric);
    return cp;
}

}  // namespace testutil
