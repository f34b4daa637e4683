#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rdbench/dct.hpp"
#include "rdbench/errors.hpp"
#include "rdbench/quant.hpp"
#include "rdbench/stats.hpp"
#include "rdbench/yuv.hpp"

namespace rdbench::proxy {

namespace detail {

// Round to nearest, ties away from zero (std::round's convention).
inline double quantize(double coeff, int divisor) {
    return std::round(coeff / static_cast<double>(divisor));
}

// Histogram of |quantized coeff| magnitudes over all 8x8 blocks of a plane.
// Scores are then formed as sum(count_k * log1p(k)), which is bit-exact
// under any permutation of whole blocks (the mean depends only on the
// multiset of quantized magnitudes, never on traversal order).
inline void plane_magnitudes(std::span<const std::uint8_t> samples, int width, int height,
                             const std::array<int, 64>& table,
                             std::vector<std::uint64_t>& histogram) {
    Block8 block{};
    for (int by = 0; by + 8 <= height; by += 8) {
        for (int bx = 0; bx + 8 <= width; bx += 8) {
            for (int r = 0; r < 8; ++r)
                for (int col = 0; col < 8; ++col)
                    block[r * 8 + col] =
                        static_cast<double>(samples[static_cast<std::size_t>(by + r) * width +
                                                    bx + col]) - 128.0;
            Block8 coeffs = dct8x8(block);
            for (int i = 0; i < 64; ++i) {
                auto mag = static_cast<std::size_t>(std::abs(quantize(coeffs[i], table[i])));
                if (mag >= histogram.size()) histogram.resize(mag + 1, 0);
                ++histogram[mag];
            }
        }
    }
}

}  // namespace detail

// DCT-domain rate estimate: blockwise orthonormal 8x8 DCT of each plane
// (level shift 128), division by the QP-mapped quantization table with
// round-to-nearest (ties away from zero), then the mean of
// log(1 + |quantized coeff|) over all coefficients of all three planes.
// Chroma uses the chroma table; pooling is weighted by sample count (the
// denominator is the total sample count across Y, Cb, Cr). Patch dimensions
// must be multiples of 8; on 16-multiples every plane tiles exactly, while
// an 8-mod-16 geometry leaves a partial chroma rim that is not transformed.
inline double rate_score(const YuvPatch& patch, int qp, const QpQualityMap& map = {}) {
    patch.validate();
    if (patch.width % 8 || patch.height % 8)
        throw invalid_input_error("rate_score: dimensions must be multiples of 8");
    QuantTables tables = quant_table(qp, map);
    std::vector<std::uint64_t> histogram;
    detail::plane_magnitudes(patch.y, patch.width, patch.height, tables.luma, histogram);
    detail::plane_magnitudes(patch.cb, patch.width / 2, patch.height / 2, tables.chroma,
                             histogram);
    detail::plane_magnitudes(patch.cr, patch.width / 2, patch.height / 2, tables.chroma,
                             histogram);
    double total = 0.0, c = 0.0;
    for (std::size_t k = 1; k < histogram.size(); ++k) {
        if (!histogram[k]) continue;
        double v = static_cast<double>(histogram[k]) * std::log1p(static_cast<double>(k)) - c;
        double t = total + v;
        c = (t - total) - v;
        total = t;
    }
    double n_coeffs = static_cast<double>(patch.y.size() + patch.cb.size() + patch.cr.size());
    return total / n_coeffs;
}

// One paired (proxy, real-encoder) observation.
struct RateMeasurement {
    std::string patch_id;
    int qp = 0;
    double real_bpp = 0.0;   // encoded bits / (width * height * frames)
    double proxy_raw = 0.0;  // rate_score output
};

// Affine calibration of real bpp on the raw proxy score, with the full
// correlation report, per-QP rank correlations across patches, and the
// fraction of patches whose proxy ordering is strictly monotone in QP.
struct CalibrationFit {
    double slope = 0.0;
    double intercept = 0.0;
    stats::CorrelationReport report;       // pooled over all measurements
    std::map<int, double> per_qp_rho;      // qp -> Spearman across patches
    double monotone_fraction = 0.0;        // strictly more bits at lower QP
    std::size_t patches_total = 0;
    std::size_t patches_excluded = 0;      // fewer than 2 QPs; not in the fraction
};

inline CalibrationFit calibrate(const std::vector<RateMeasurement>& measurements) {
    std::map<std::string, std::map<int, const RateMeasurement*>> by_patch;
    for (const auto& m : measurements) {
        if (m.real_bpp <= 0.0)
            throw invalid_input_error("calibrate: non-positive real_bpp for " + m.patch_id);
        if (m.proxy_raw < 0.0)
            throw invalid_input_error("calibrate: negative proxy_raw for " + m.patch_id);
        by_patch[m.patch_id][m.qp] = &m;
    }
    if (by_patch.size() < 2)
        throw invalid_input_error("calibrate: need at least 2 distinct patches");

    std::vector<double> proxy, bpp;
    proxy.reserve(measurements.size());
    bpp.reserve(measurements.size());
    for (const auto& m : measurements) {
        proxy.push_back(m.proxy_raw);
        bpp.push_back(m.real_bpp);
    }

    CalibrationFit fit;
    auto ols = stats::affine_fit(proxy, bpp);
    fit.slope = ols.slope;
    fit.intercept = ols.intercept;
    fit.report.spearman_rho = stats::spearman(proxy, bpp);
    fit.report.pearson_r = stats::pearson(proxy, bpp);
    fit.report.mae = stats::mae_after_affine(proxy, bpp, fit.slope, fit.intercept);
    fit.report.n = measurements.size();

    // Per-QP Spearman across patches (only QPs observed on >= 2 patches).
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_qp;
    for (const auto& m : measurements) {
        by_qp[m.qp].first.push_back(m.proxy_raw);
        by_qp[m.qp].second.push_back(m.real_bpp);
    }
    for (const auto& [qp, cols] : by_qp)
        if (cols.first.size() >= 2)
            fit.per_qp_rho[qp] = stats::spearman(cols.first, cols.second);

    // Monotone fraction: proxy strictly increasing as QP decreases.
    fit.patches_total = by_patch.size();
    std::size_t monotone = 0, counted = 0;
    for (const auto& [id, grid] : by_patch) {
        if (grid.size() < 2) {
            ++fit.patches_excluded;  // monotone ordering undefined on one sample
            continue;
        }
        ++counted;
        bool ok = true;
        const RateMeasurement* prev = nullptr;
        for (const auto& [qp, m] : grid) {  // ascending qp
            if (prev && !(m->proxy_raw < prev->proxy_raw)) ok = false;
            prev = m;
        }
        if (ok) ++monotone;
    }
    fit.monotone_fraction =
        counted ? static_cast<double>(monotone) / static_cast<double>(counted) : 0.0;
    return fit;
}

namespace detail {

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace detail

// CSV with columns patch_id,qp,proxy_raw,real_bpp.
inline void write_measurements_csv(std::ostream& out,
                                   const std::vector<RateMeasurement>& ms) {
    out << "patch_id,qp,proxy_raw,real_bpp\n";
    for (const auto& m : ms)
        out << m.patch_id << ',' << m.qp << ',' << detail::fixed(m.proxy_raw, 6) << ','
            << detail::fixed(m.real_bpp, 6) << '\n';
}

// Fit summary CSV: slope,intercept,spearman,pearson,mae,per_qp_rho_<qp>...,
// monotone_fraction.
inline void write_fit_csv(std::ostream& out, const CalibrationFit& fit) {
    out << "slope,intercept,spearman,pearson,mae";
    for (const auto& [qp, rho] : fit.per_qp_rho) out << ",per_qp_rho_" << qp;
    out << ",monotone_fraction,patches_total,patches_excluded\n";
    out << detail::fixed(fit.slope, 6) << ',' << detail::fixed(fit.intercept, 6) << ','
        << detail::fixed(fit.report.spearman_rho, 6) << ','
        << detail::fixed(fit.report.pearson_r, 6) << ',' << detail::fixed(fit.report.mae, 6);
    for (const auto& [qp, rho] : fit.per_qp_rho) out << ',' << detail::fixed(rho, 6);
    out << ',' << detail::fixed(fit.monotone_fraction, 6) << ',' << fit.patches_total << ','
        << fit.patches_excluded << '\n';
}

}  // namespace rdbench::proxy
