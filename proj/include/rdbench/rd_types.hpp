#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rdbench/errors.hpp"

namespace rdbench {

enum class MetricKind { vmaf, vmaf_neg, psnr_y, ms_ssim };

constexpr std::array<MetricKind, 4> all_metrics{MetricKind::vmaf, MetricKind::vmaf_neg,
                                                MetricKind::psnr_y, MetricKind::ms_ssim};

constexpr const char* metric_name(MetricKind m) {
    switch (m) {
        case MetricKind::vmaf: return "vmaf";
        case MetricKind::vmaf_neg: return "vmaf_neg";
        case MetricKind::psnr_y: return "psnr_y";
        case MetricKind::ms_ssim: return "ms_ssim";
    }
    return "?";
}

inline MetricKind parse_metric(std::string_view s) {
    for (MetricKind m : all_metrics)
        if (s == metric_name(m)) return m;
    // tolerated aliases seen in the wild
    if (s == "vmaf-neg" || s == "vmafneg" || s == "vmaf_v0.6.1neg") return MetricKind::vmaf_neg;
    if (s == "psnr" || s == "psnr-y") return MetricKind::psnr_y;
    if (s == "ms-ssim" || s == "msssim" || s == "float_ms_ssim") return MetricKind::ms_ssim;
    throw invalid_input_error("unknown metric: " + std::string(s));
}

// Plausible score band per metric: VMAF family in [0,100], MS-SSIM in [0,1],
// PSNR-Y in (0,100) dB.
inline bool plausible_score(MetricKind m, double v) {
    switch (m) {
        case MetricKind::vmaf:
        case MetricKind::vmaf_neg: return v >= 0.0 && v <= 100.0;
        case MetricKind::psnr_y: return v > 0.0 && v < 100.0;
        case MetricKind::ms_ssim: return v >= 0.0 && v <= 1.0;
    }
    return false;
}

constexpr std::array<int, 4> canonical_qp_grid{22, 27, 32, 37};

// One (QP, bitrate, scores) sample of an RD curve.
struct RDPoint {
    int qp = 0;
    double bitrate_kbps = 0.0;
    std::map<MetricKind, double> scores;

    double score(MetricKind m) const {
        auto it = scores.find(m);
        if (it == scores.end())
            throw invalid_input_error(std::string("RDPoint: missing score for ") +
                                      metric_name(m));
        return it->second;
    }
};

// The per-(sequence, variant) curve; canonically four constant-QP points.
struct RDCurve {
    std::string sequence_id;
    std::string variant_id;
    std::vector<RDPoint> points;

    bool is_canonical() const {
        if (points.size() != canonical_qp_grid.size()) return false;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (points[i].qp != canonical_qp_grid[i]) return false;
        return true;
    }

    // Enforces: >= 2 points, strictly ascending qp, strictly positive and
    // strictly decreasing bitrate with qp.
    void validate() const {
        if (points.size() < 2)
            throw invalid_input_error("RDCurve " + sequence_id + "/" + variant_id +
                                      ": need at least 2 points");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].bitrate_kbps <= 0.0)
                throw invalid_input_error("RDCurve " + sequence_id + "/" + variant_id +
                                          ": non-positive bitrate");
            if (i > 0) {
                if (points[i].qp <= points[i - 1].qp)
                    throw invalid_input_error("RDCurve " + sequence_id + "/" + variant_id +
                                              ": points not in ascending qp order");
                if (points[i].bitrate_kbps >= points[i - 1].bitrate_kbps)
                    throw invalid_input_error("RDCurve " + sequence_id + "/" + variant_id +
                                              ": bitrate not strictly decreasing with qp");
            }
        }
    }
};

}  // namespace rdbench
