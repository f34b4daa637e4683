#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdbench/csv.hpp"
#include "rdbench/errors.hpp"
#include "rdbench/quant.hpp"

namespace rdbench {

struct SliceSpec {
    std::string name;
    std::vector<std::string> exclude;  // sequence_ids dropped from the slice
};

// Thresholds of the failure-mode cascade. The defaults are this toolkit's
// documented choices; every classification output echoes the values used.
struct TaxonomyThresholds {
    double regression_pp = 10.0;        // both VMAF deltas above this = regression
    double smooth_fraction_min = 0.5;   // at/above: rate-floor; below: distribution shift
    double saturation_quality = 98.0;   // baseline top-of-curve score at/above = saturated
    double disagreement_pp = 50.0;      // cross-metric spread needed for saturation
};

struct RunConfig {
    // tool discovery: explicit path beats environment beats PATH lookup
    std::string ffmpeg_path;                      // empty = env/PATH discovery
    std::string vmaf_filter;                      // libvmaf filter spec override
    std::vector<int> qp_grid{22, 27, 32, 37};
    int workers = 4;                              // job pool width; encodes stay single-threaded
    std::string cache_dir;                        // empty = no cache
    bool keep_intermediates = false;
    proxy::QpQualityMap qp_quality;               // rate-proxy quality anchors
    TaxonomyThresholds taxonomy;
    double gaming_threshold_pp = 5.0;
    double gaming_sign_fraction = 0.8;
    double smooth_block_variance = 4.0;
    std::string baseline_variant = "baseline";
    std::vector<SliceSpec> slices{{"all", {}}};
    csv::AliasTable csv_aliases = csv::default_aliases();
};

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config parse error in " + path.string() + ": " + e.what());
    }

    RunConfig cfg;
    try {
        if (j.contains("ffmpeg")) cfg.ffmpeg_path = j["ffmpeg"].get<std::string>();
        if (j.contains("vmaf_filter")) cfg.vmaf_filter = j["vmaf_filter"].get<std::string>();
        if (j.contains("qp_grid")) cfg.qp_grid = j["qp_grid"].get<std::vector<int>>();
        if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        if (j.contains("cache_dir")) cfg.cache_dir = j["cache_dir"].get<std::string>();
        if (j.contains("keep_intermediates"))
            cfg.keep_intermediates = j["keep_intermediates"].get<bool>();
        if (j.contains("baseline_variant"))
            cfg.baseline_variant = j["baseline_variant"].get<std::string>();
        if (j.contains("qp_to_quality")) {
            const auto& q = j["qp_to_quality"];
            cfg.qp_quality.qp_lo = q.value("qp_lo", cfg.qp_quality.qp_lo);
            cfg.qp_quality.quality_at_lo = q.value("quality_at_lo", cfg.qp_quality.quality_at_lo);
            cfg.qp_quality.qp_hi = q.value("qp_hi", cfg.qp_quality.qp_hi);
            cfg.qp_quality.quality_at_hi = q.value("quality_at_hi", cfg.qp_quality.quality_at_hi);
        }
        if (j.contains("taxonomy")) {
            const auto& t = j["taxonomy"];
            cfg.taxonomy.regression_pp = t.value("regression_pp", cfg.taxonomy.regression_pp);
            cfg.taxonomy.smooth_fraction_min =
                t.value("smooth_fraction_min", cfg.taxonomy.smooth_fraction_min);
            cfg.taxonomy.saturation_quality =
                t.value("saturation_quality", cfg.taxonomy.saturation_quality);
            cfg.taxonomy.disagreement_pp =
                t.value("disagreement_pp", cfg.taxonomy.disagreement_pp);
        }
        if (j.contains("gaming")) {
            const auto& g = j["gaming"];
            cfg.gaming_threshold_pp = g.value("threshold_pp", cfg.gaming_threshold_pp);
            cfg.gaming_sign_fraction = g.value("sign_fraction", cfg.gaming_sign_fraction);
        }
        if (j.contains("smooth_block_variance"))
            cfg.smooth_block_variance = j["smooth_block_variance"].get<double>();
        if (j.contains("slices")) {
            cfg.slices.clear();
            for (const auto& s : j["slices"]) {
                SliceSpec spec;
                spec.name = s.at("name").get<std::string>();
                if (s.contains("exclude"))
                    spec.exclude = s["exclude"].get<std::vector<std::string>>();
                cfg.slices.push_back(std::move(spec));
            }
        }
        if (j.contains("csv_aliases")) {
            for (const auto& [canonical, list] : j["csv_aliases"].items()) {
                auto& entry = cfg.csv_aliases[canonical];
                for (const auto& alias : list) entry.push_back(alias.get<std::string>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error("bad config value in " + path.string() + ": " + e.what());
    }
    if (cfg.workers < 1) throw config_error("workers must be >= 1");
    if (cfg.qp_grid.empty()) throw config_error("qp_grid must not be empty");
    return cfg;
}

// Inline slice spec syntax: "name:excl1+excl2;name2:..." ("all" = no exclusions).
inline std::vector<SliceSpec> parse_slice_spec(const std::string& spec) {
    std::vector<SliceSpec> out;
    std::string item;
    std::istringstream is(spec);
    while (std::getline(is, item, ';')) {
        if (item.empty()) continue;
        SliceSpec s;
        auto colon = item.find(':');
        if (colon == std::string::npos) {
            s.name = item;
        } else {
            s.name = item.substr(0, colon);
            std::string rest = item.substr(colon + 1);
            std::istringstream rs(rest);
            std::string id;
            while (std::getline(rs, id, '+'))
                if (!id.empty()) s.exclude.push_back(id);
        }
        out.push_back(std::move(s));
    }
    if (out.empty()) throw config_error("empty slice spec");
    return out;
}

}  // namespace rdbench
