#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rdbench/config.hpp"
#include "rdbench/csv.hpp"
#include "rdbench/errors.hpp"
#include "rdbench/rd_types.hpp"
#include "rdbench/stats.hpp"

namespace rdbench::analytics {

// Optional content statistics backing the rate-floor vs distribution-shift
// discrimination. Absence restricts the reachable labels.
struct AuxStats {
    double smooth_fraction = 0.0;                 // in [0, 1]
    std::optional<double> chroma_saturation;      // summary statistic, in [0, 1]
};

struct SequenceRecord {
    std::string sequence_id;
    std::map<MetricKind, double> bd;              // percent
    double baseline_top_quality = std::numeric_limits<double>::quiet_NaN();
    std::optional<AuxStats> aux;

    double bd_of(MetricKind m) const {
        auto it = bd.find(m);
        if (it == bd.end())
            throw invalid_input_error("record " + sequence_id + ": missing bd for " +
                                      std::string(metric_name(m)));
        return it->second;
    }
};

struct MetricStats {
    double mean = 0.0;
    double median = 0.0;        // interpolated (average of the middle two)
    double median_lower = 0.0;  // lower-middle order statistic
    double stddev = 0.0;        // population
    double min = 0.0;
    double max = 0.0;
};

struct CorpusSlice {
    std::string name;
    std::vector<std::string> included;
    std::map<MetricKind, MetricStats> stats;
    std::map<MetricKind, int> win_count;  // bd < 0
};

inline CorpusSlice aggregate(const std::vector<SequenceRecord>& records,
                             const SliceSpec& spec) {
    CorpusSlice slice;
    slice.name = spec.name;
    std::vector<const SequenceRecord*> kept;
    for (const auto& r : records) {
        if (std::find(spec.exclude.begin(), spec.exclude.end(), r.sequence_id) !=
            spec.exclude.end())
            continue;
        kept.push_back(&r);
        slice.included.push_back(r.sequence_id);
    }
    if (kept.empty())
        throw invalid_slice_error("slice '" + spec.name + "': no sequences after exclusions");

    for (MetricKind m : all_metrics) {
        if (!kept.front()->bd.count(m)) continue;  // metric absent from this corpus
        std::vector<double> values;
        values.reserve(kept.size());
        int wins = 0;
        for (const auto* r : kept) {
            double v = r->bd_of(m);
            if (!std::isfinite(v))
                throw invalid_input_error("record " + r->sequence_id + ": non-finite bd");
            values.push_back(v);
            if (v < 0.0) ++wins;
        }
        MetricStats s;
        s.mean = stats::mean(values);
        s.median = stats::median(values);
        s.median_lower = stats::median_lower(values);
        s.stddev = stats::stddev(values);
        s.min = *std::min_element(values.begin(), values.end());
        s.max = *std::max_element(values.begin(), values.end());
        slice.stats[m] = s;
        slice.win_count[m] = wins;
    }
    return slice;
}

enum class FailureMode {
    rate_floor_violation,
    distribution_shift,
    metric_saturation,
    no_failure,
};

constexpr const char* failure_name(FailureMode m) {
    switch (m) {
        case FailureMode::rate_floor_violation: return "RateFloorViolation";
        case FailureMode::distribution_shift: return "DistributionShift";
        case FailureMode::metric_saturation: return "MetricSaturation";
        case FailureMode::no_failure: return "NoFailure";
    }
    return "?";
}

struct FailureLabel {
    FailureMode mode = FailureMode::no_failure;
    std::string evidence;  // always names the thresholds it was judged against
};

// Decision cascade:
//   1. both VMAF and VMAF-NEG deltas above the regression threshold ->
//      RateFloorViolation when the content is smooth enough, else
//      DistributionShift (low confidence when aux stats are missing);
//   2. else a saturated baseline top score plus strong cross-metric
//      disagreement -> MetricSaturation;
//   3. else NoFailure.
inline FailureLabel classify_failure(const SequenceRecord& record,
                                     const TaxonomyThresholds& t = {}) {
    double bd_vmaf = record.bd_of(MetricKind::vmaf);
    double bd_neg = record.bd_of(MetricKind::vmaf_neg);
    std::ostringstream ev;
    ev.setf(std::ios::fixed);
    ev.precision(2);
    ev << "bd_vmaf=" << bd_vmaf << " bd_vmaf_neg=" << bd_neg
       << " thresholds{regression=" << t.regression_pp
       << ", smooth_min=" << t.smooth_fraction_min
       << ", saturation_quality=" << t.saturation_quality
       << ", disagreement=" << t.disagreement_pp << "}";

    FailureLabel label;
    if (bd_vmaf > t.regression_pp && bd_neg > t.regression_pp) {
        if (record.aux) {
            ev << " smooth_fraction=" << record.aux->smooth_fraction;
            if (record.aux->smooth_fraction >= t.smooth_fraction_min) {
                label.mode = FailureMode::rate_floor_violation;
                ev << "; regression on smooth content";
            } else {
                label.mode = FailureMode::distribution_shift;
                ev << "; regression on non-smooth content";
            }
        } else {
            label.mode = FailureMode::distribution_shift;
            ev << "; regression, no aux statistics (low confidence: rate-floor "
                  "not distinguishable)";
        }
        label.evidence = ev.str();
        return label;
    }

    double span = 0.0;
    bool have_all = true;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (MetricKind m : all_metrics) {
        auto it = record.bd.find(m);
        if (it == record.bd.end()) {
            have_all = false;
            break;
        }
        lo = first ? it->second : std::min(lo, it->second);
        hi = first ? it->second : std::max(hi, it->second);
        first = false;
    }
    if (have_all) span = hi - lo;

    if (std::isfinite(record.baseline_top_quality) &&
        record.baseline_top_quality >= t.saturation_quality && have_all &&
        span >= t.disagreement_pp) {
        label.mode = FailureMode::metric_saturation;
        ev << " baseline_top_quality=" << record.baseline_top_quality
           << " metric_spread=" << span << "; integration window pressed against the cap";
        label.evidence = ev.str();
        return label;
    }

    label.mode = FailureMode::no_failure;
    label.evidence = ev.str();
    return label;
}

struct GamingSignature {
    bool flagged = false;
    double mean_bd_vmaf = 0.0;
    double mean_bd_vmaf_neg = 0.0;
    int positive_neg_count = 0;
    std::string evidence;  // per-sequence sign pattern
};

// The VMAF-gaming test: large mean VMAF gain, large mean VMAF-NEG loss, and
// the NEG sign positive on at least `sign_fraction` of sequences. The
// criterion is the agreement direction across metrics, not any single
// magnitude.
inline GamingSignature gaming_signature(std::span<const double> bd_vmaf,
                                        std::span<const double> bd_vmaf_neg,
                                        double threshold_pp = 5.0,
                                        double sign_fraction = 0.8) {
    if (bd_vmaf.size() != bd_vmaf_neg.size() || bd_vmaf.empty())
        throw invalid_input_error("gaming_signature: need equal-length non-empty inputs");
    GamingSignature sig;
    sig.mean_bd_vmaf = stats::sum(bd_vmaf) / static_cast<double>(bd_vmaf.size());
    sig.mean_bd_vmaf_neg = stats::sum(bd_vmaf_neg) / static_cast<double>(bd_vmaf_neg.size());
    std::ostringstream ev;
    for (std::size_t i = 0; i < bd_vmaf_neg.size(); ++i) {
        sig.positive_neg_count += bd_vmaf_neg[i] > 0.0 ? 1 : 0;
        ev << (i ? "," : "neg signs: ") << (bd_vmaf_neg[i] > 0.0 ? '+' : '-');
    }
    double frac = static_cast<double>(sig.positive_neg_count) /
                  static_cast<double>(bd_vmaf_neg.size());
    sig.flagged = sig.mean_bd_vmaf <= -threshold_pp && sig.mean_bd_vmaf_neg >= threshold_pp &&
                  frac >= sign_fraction;
    ev.setf(std::ios::fixed);
    ev.precision(2);
    ev << "; mean_vmaf=" << sig.mean_bd_vmaf << " mean_neg=" << sig.mean_bd_vmaf_neg
       << " neg_positive=" << sig.positive_neg_count << "/" << bd_vmaf_neg.size()
       << " threshold=" << threshold_pp;
    sig.evidence = ev.str();
    return sig;
}

// Fraction of 8x8 luma blocks whose sample variance falls below the
// threshold (default 4.0 in squared 8-bit code units).
inline double smooth_fraction(std::span<const std::uint8_t> luma, int width, int height,
                              double variance_threshold = 4.0) {
    if (width <= 0 || height <= 0 || width % 8 || height % 8)
        throw invalid_input_error("smooth_fraction: plane must tile by 8x8");
    if (luma.size() != static_cast<std::size_t>(width) * height)
        throw invalid_input_error("smooth_fraction: plane size mismatch");
    std::size_t smooth = 0, total = 0;
    for (int by = 0; by < height; by += 8)
        for (int bx = 0; bx < width; bx += 8) {
            double s = 0.0, s2 = 0.0;
            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c) {
                    double v = luma[static_cast<std::size_t>(by + r) * width + bx + c];
                    s += v;
                    s2 += v * v;
                }
            double m = s / 64.0;
            double var = s2 / 64.0 - m * m;
            ++total;
            if (var < variance_threshold) ++smooth;
        }
    return static_cast<double>(smooth) / static_cast<double>(total);
}

}  // namespace rdbench::analytics
