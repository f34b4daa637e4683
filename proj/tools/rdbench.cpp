// rdbench: rate-distortion benchmarking and calibration toolkit.
//
// Subcommands: sweep, bdrate, report, plot, calibrate, classify.
// Exit codes: 0 success, 2 parse/config/usage error, 3 partial results.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rdbench/analytics.hpp"
#include "rdbench/bd.hpp"
#include "rdbench/calibration.hpp"
#include "rdbench/config.hpp"
#include "rdbench/csv.hpp"
#include "rdbench/harness.hpp"
#include "rdbench/rate_proxy.hpp"
#include "rdbench/svg.hpp"

namespace fs = std::filesystem;
using namespace rdbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;

RunConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return load_config(path);
}

std::string pct(double v) { return csv::fixed(v, 2); }

// ---------------------------------------------------------------- bdrate --

struct BdRow {
    std::string label;  // sequence, or sequence/variant with several variants
    std::map<MetricKind, double> bd;
    int merged_points = 0;  // saturation-merged knots; nonzero rows are annotated
    std::string error;  // non-empty = row failed (reported, excluded from aggregate)
};

int cmd_bdrate(const std::string& csv_path, const std::string& out_path,
               const std::string& baseline, const std::string& config_path) {
    RunConfig cfg = load_config_or_default(config_path);
    std::string base_variant = baseline.empty() ? cfg.baseline_variant : baseline;

    auto table = csv::parse_file(csv_path);
    auto rows = csv::read_per_qp(table, cfg.csv_aliases);
    auto curves = csv::group_curves(rows);

    std::vector<std::string> variants;
    bool have_baseline = false;
    for (const auto& [key, curve] : curves) {
        if (key.second == base_variant) have_baseline = true;
        else if (std::find(variants.begin(), variants.end(), key.second) == variants.end())
            variants.push_back(key.second);
    }
    if (!have_baseline)
        throw config_error("baseline variant '" + base_variant + "' not present in " +
                           csv_path);
    if (variants.empty())
        throw config_error("no comparison variant found in " + csv_path);
    for (const auto& [key, curve] : curves)
        if (!curve.is_canonical())
            std::fprintf(stderr, "note: %s/%s uses a non-canonical QP grid\n",
                         key.first.c_str(), key.second.c_str());

    bool label_with_variant = variants.size() > 1;
    std::vector<BdRow> out_rows;
    for (const auto& [key, curve] : curves) {
        const auto& [sequence, variant] = key;
        if (variant == base_variant) continue;
        auto base_it = curves.find({sequence, base_variant});
        BdRow row;
        row.label = label_with_variant ? sequence + "/" + variant : sequence;
        if (base_it == curves.end()) {
            row.error = "no baseline rows for sequence";
            out_rows.push_back(std::move(row));
            continue;
        }
        try {
            for (MetricKind m : all_metrics) {
                auto r = bd::bd_rate(base_it->second, curve, m);
                row.bd[m] = r.bd_rate_percent;
                row.merged_points += r.merged_points;
            }
        } catch (const error& e) {
            row.bd.clear();
            row.error = e.what();
        }
        out_rows.push_back(std::move(row));
    }
    std::sort(out_rows.begin(), out_rows.end(),
              [](const BdRow& a, const BdRow& b) { return a.label < b.label; });

    std::printf("%-28s %12s %12s %12s %12s\n", "sequence", "BD-VMAF", "BD-VMAF-NEG",
                "BD-PSNR-Y", "BD-MS-SSIM");
    std::map<MetricKind, std::vector<double>> agg;
    int failed = 0;
    for (const auto& r : out_rows) {
        if (!r.error.empty()) {
            ++failed;
            std::printf("%-28s %12s  (%s)\n", r.label.c_str(), "ERROR", r.error.c_str());
            continue;
        }
        std::printf("%-28s %12s %12s %12s %12s%s\n", r.label.c_str(),
                    pct(r.bd.at(MetricKind::vmaf)).c_str(),
                    pct(r.bd.at(MetricKind::vmaf_neg)).c_str(),
                    pct(r.bd.at(MetricKind::psnr_y)).c_str(),
                    pct(r.bd.at(MetricKind::ms_ssim)).c_str(),
                    r.merged_points ? "  (saturation-merged points)" : "");
        for (MetricKind m : all_metrics) agg[m].push_back(r.bd.at(m));
    }
    if (!agg[MetricKind::vmaf].empty()) {
        std::printf("%-28s %12s %12s %12s %12s\n",
                    ("mean (n=" + std::to_string(agg[MetricKind::vmaf].size()) + ")").c_str(),
                    pct(stats::mean(agg[MetricKind::vmaf])).c_str(),
                    pct(stats::mean(agg[MetricKind::vmaf_neg])).c_str(),
                    pct(stats::mean(agg[MetricKind::psnr_y])).c_str(),
                    pct(stats::mean(agg[MetricKind::ms_ssim])).c_str());
    }

    if (!out_path.empty()) {
        std::vector<csv::SummaryRow> summary;
        for (const auto& r : out_rows) {
            if (!r.error.empty()) continue;
            csv::SummaryRow s;
            s.sequence = r.label;
            s.bd = r.bd;
            summary.push_back(std::move(s));
        }
        std::ostringstream text;
        csv::write(text, csv::to_table(summary));
        csv::write_file_atomic(out_path, text.str());
    }
    return failed == 0 ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- report --

std::map<std::string, analytics::AuxStats> read_aux(const std::string& path,
                                                    std::map<std::string, double>& top_quality) {
    std::map<std::string, analytics::AuxStats> out;
    if (path.empty()) return out;
    auto t = csv::parse_file(path);
    auto c_seq = t.column("sequence");
    std::optional<std::size_t> c_smooth, c_chroma, c_top;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == "smooth_fraction") c_smooth = i;
        if (t.header[i] == "chroma_saturation") c_chroma = i;
        if (t.header[i] == "baseline_top_quality") c_top = i;
    }
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        std::size_t line_no = i + 2;
        if (c_smooth) {
            analytics::AuxStats aux;
            aux.smooth_fraction = csv::parse_double(r[*c_smooth], line_no);
            if (c_chroma) aux.chroma_saturation = csv::parse_double(r[*c_chroma], line_no);
            out[r[c_seq]] = aux;
        }
        if (c_top) top_quality[r[c_seq]] = csv::parse_double(r[*c_top], line_no);
    }
    return out;
}

std::vector<analytics::SequenceRecord> records_from_summary(
    const std::vector<csv::SummaryRow>& rows,
    const std::map<std::string, analytics::AuxStats>& aux,
    const std::map<std::string, double>& top_quality) {
    std::vector<analytics::SequenceRecord> recs;
    for (const auto& r : rows) {
        analytics::SequenceRecord rec;
        rec.sequence_id = r.sequence;
        rec.bd = r.bd;
        if (auto it = aux.find(r.sequence); it != aux.end()) rec.aux = it->second;
        if (auto it = top_quality.find(r.sequence); it != top_quality.end())
            rec.baseline_top_quality = it->second;
        recs.push_back(std::move(rec));
    }
    return recs;
}

int cmd_report(const std::string& csv_path, const std::string& slices_arg,
               const std::string& aux_path, const std::string& out_path,
               const std::string& config_path) {
    RunConfig cfg = load_config_or_default(config_path);
    auto table = csv::parse_file(csv_path);
    auto rows = csv::read_summary(table, cfg.csv_aliases);
    std::map<std::string, double> top_quality;
    auto aux = read_aux(aux_path, top_quality);
    auto records = records_from_summary(rows, aux, top_quality);

    std::vector<SliceSpec> slices =
        slices_arg.empty() ? cfg.slices : parse_slice_spec(slices_arg);

    csv::Table out_table;
    out_table.header = {"slice",           "n",
                        "mean_bd_vmaf",    "median_bd_vmaf",
                        "std_bd_vmaf",     "min_bd_vmaf",
                        "max_bd_vmaf",     "mean_bd_vmaf_neg",
                        "mean_bd_psnr_y",  "mean_bd_ms_ssim",
                        "wins_vmaf",       "wins_vmaf_neg",
                        "wins_psnr_y",     "wins_ms_ssim"};
    std::printf("%-34s %4s %14s %16s %13s %18s %14s %16s %10s %14s\n", "slice", "n",
                "mean BD-VMAF", "median BD-VMAF", "std BD-VMAF", "mean BD-VMAF-NEG",
                "mean BD-PSNR-Y", "mean BD-MS-SSIM", "wins VMAF", "wins VMAF-NEG");
    for (const auto& spec : slices) {
        auto slice = analytics::aggregate(records, spec);
        auto n = slice.included.size();
        auto has = [&](MetricKind m) { return slice.stats.count(m) != 0; };
        auto mean_of = [&](MetricKind m) {
            return has(m) ? pct(slice.stats.at(m).mean) : std::string("-");
        };
        auto wins_of = [&](MetricKind m) {
            return has(m) ? std::to_string(slice.win_count.at(m)) + "/" + std::to_string(n)
                          : std::string("-");
        };
        bool v = has(MetricKind::vmaf);
        const auto* vs = v ? &slice.stats.at(MetricKind::vmaf) : nullptr;
        std::string med = v ? pct(vs->median) : "-";
        std::string std_v = v ? pct(vs->stddev) : "-";
        std::printf("%-34s %4zu %14s %16s %13s %18s %14s %16s %10s %14s\n", slice.name.c_str(),
                    n, mean_of(MetricKind::vmaf).c_str(), med.c_str(), std_v.c_str(),
                    mean_of(MetricKind::vmaf_neg).c_str(), mean_of(MetricKind::psnr_y).c_str(),
                    mean_of(MetricKind::ms_ssim).c_str(), wins_of(MetricKind::vmaf).c_str(),
                    wins_of(MetricKind::vmaf_neg).c_str());
        out_table.rows.push_back({slice.name, std::to_string(n), mean_of(MetricKind::vmaf),
                                  med, std_v, v ? pct(vs->min) : "-", v ? pct(vs->max) : "-",
                                  mean_of(MetricKind::vmaf_neg), mean_of(MetricKind::psnr_y),
                                  mean_of(MetricKind::ms_ssim), wins_of(MetricKind::vmaf),
                                  wins_of(MetricKind::vmaf_neg), wins_of(MetricKind::psnr_y),
                                  wins_of(MetricKind::ms_ssim)});
    }

    if (!aux.empty() || !top_quality.empty()) {
        std::printf("\nfailure classification (thresholds in evidence):\n");
        for (const auto& rec : records) {
            auto label = analytics::classify_failure(rec, cfg.taxonomy);
            std::printf("  %-20s %-22s %s\n", rec.sequence_id.c_str(),
                        analytics::failure_name(label.mode), label.evidence.c_str());
        }
    }

    if (!out_path.empty()) {
        std::ostringstream text;
        csv::write(text, out_table);
        csv::write_file_atomic(out_path, text.str());
    }
    return kExitOk;
}

// -------------------------------------------------------------- classify --

int cmd_classify(const std::string& csv_path, const std::string& aux_path,
                 const std::string& config_path) {
    RunConfig cfg = load_config_or_default(config_path);
    auto table = csv::parse_file(csv_path);
    auto rows = csv::read_summary(table, cfg.csv_aliases);
    std::map<std::string, double> top_quality;
    auto aux = read_aux(aux_path, top_quality);
    auto records = records_from_summary(rows, aux, top_quality);
    for (const auto& rec : records) {
        auto label = analytics::classify_failure(rec, cfg.taxonomy);
        std::printf("%-20s %-22s %s\n", rec.sequence_id.c_str(),
                    analytics::failure_name(label.mode), label.evidence.c_str());
    }

    std::vector<double> bd_vmaf, bd_neg;
    for (const auto& r : records) {
        if (r.bd.count(MetricKind::vmaf) && r.bd.count(MetricKind::vmaf_neg)) {
            bd_vmaf.push_back(r.bd.at(MetricKind::vmaf));
            bd_neg.push_back(r.bd.at(MetricKind::vmaf_neg));
        }
    }
    if (!bd_vmaf.empty()) {
        auto sig = analytics::gaming_signature(bd_vmaf, bd_neg, cfg.gaming_threshold_pp,
                                               cfg.gaming_sign_fraction);
        std::printf("gaming signature: %s (%s)\n", sig.flagged ? "FLAGGED" : "not flagged",
                    sig.evidence.c_str());
    }
    return kExitOk;
}

// ------------------------------------------------------------------ plot --

int cmd_plot(const std::string& csv_path, const std::string& metric_arg,
             const std::string& out_dir, const std::string& summary_path,
             const std::string& baseline, const std::string& config_path) {
    RunConfig cfg = load_config_or_default(config_path);
    std::string base_variant = baseline.empty() ? cfg.baseline_variant : baseline;

    std::vector<MetricKind> metrics;
    if (metric_arg == "all") {
        metrics.assign(all_metrics.begin(), all_metrics.end());
    } else {
        metrics.push_back(parse_metric(metric_arg));  // unknown -> usage error
    }

    if (!csv_path.empty()) {
        auto table = csv::parse_file(csv_path);
        auto rows = csv::read_per_qp(table, cfg.csv_aliases);
        for (MetricKind m : metrics) {
            auto written = svg::write_rd_plots(rows, base_variant, m, out_dir);
            for (const auto& p : written) std::printf("wrote %s\n", p.string().c_str());
        }
    }
    if (!summary_path.empty()) {
        auto table = csv::parse_file(summary_path);
        auto rows = csv::read_summary(table, cfg.csv_aliases);
        auto p = svg::write_bd_scatter(rows, fs::path(out_dir) / "bd_scatter.svg");
        std::printf("wrote %s\n", p.string().c_str());
    }
    return kExitOk;
}

// ----------------------------------------------------------------- sweep --

int cmd_sweep(const std::string& manifest_path, const std::string& variant_spec,
              const std::string& out_path, const std::string& work_dir, bool no_score,
              bool keep_intermediates, const std::string& config_path) {
    RunConfig cfg = load_config_or_default(config_path);
    if (keep_intermediates) cfg.keep_intermediates = true;
    auto sequences = harness::parse_manifest(manifest_path);
    if (sequences.empty()) throw config_error("manifest lists no sequences");
    auto ctx = harness::make_tool_context(cfg, work_dir.empty() ? "rdbench_work" : work_dir);
    if (ctx.ffmpeg_version.empty())
        throw config_error("encoder tool not available: " + ctx.ffmpeg);
    std::fprintf(stderr, "tool: %s\n", ctx.ffmpeg_version.c_str());

    // variant spec: "pre:<command template>" runs a preprocessor leg;
    // an encoder variant name runs a panel leg; empty = baseline only.
    std::optional<std::string> preprocessor;
    std::optional<harness::EncoderVariant> panel;
    if (!variant_spec.empty()) {
        if (variant_spec.rfind("pre:", 0) == 0) preprocessor = variant_spec.substr(4);
        else panel = harness::parse_encoder_variant(variant_spec);
    }

    struct JobSpec {
        harness::EncodeJob job;
        std::string sequence;
    };
    std::vector<JobSpec> jobs;
    for (const auto& seq : sequences) {
        seq.validate_file();
        for (int qp : cfg.qp_grid) {
            harness::EncodeJob j;
            j.sequence = seq;
            j.variant_id = "baseline";
            j.qp = qp;
            jobs.push_back({j, seq.name});
        }
        if (preprocessor) {
            auto pre = harness::run_preprocessor(*preprocessor, seq, ctx);
            for (int qp : cfg.qp_grid) {
                harness::EncodeJob j;
                j.sequence = pre;
                j.sequence.name = seq.name;
                j.variant_id = "variant";
                j.qp = qp;
                j.preprocessor = preprocessor;
                jobs.push_back({j, seq.name});
            }
        } else if (panel) {
            for (int qp : cfg.qp_grid) {
                harness::EncodeJob j;
                j.sequence = seq;
                j.variant_id = harness::variant_name(*panel);
                j.qp = qp;
                j.encoder = *panel;
                jobs.push_back({j, seq.name});
            }
        }
    }

    std::map<std::string, const harness::SequenceInfo*> ref_of;
    for (const auto& seq : sequences) ref_of[seq.name] = &seq;

    std::vector<harness::ScoredEncode> encodes(jobs.size());
    auto errors = harness::run_parallel(jobs.size(), cfg.workers, [&](std::size_t i) {
        auto e = harness::encode(jobs[i].job, ctx);
        if (!no_score) e = harness::score(*ref_of.at(jobs[i].sequence), std::move(e), ctx);
        encodes[i] = std::move(e);
    });

    std::vector<csv::PerQpRow> rows;
    std::vector<std::string> failures;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!errors[i].empty()) {
            failures.push_back(jobs[i].sequence + "/" + jobs[i].job.variant_id + "/qp" +
                               std::to_string(jobs[i].job.qp) + ": " + errors[i]);
            continue;
        }
        const auto& e = encodes[i];
        csv::PerQpRow r;
        r.sequence = jobs[i].sequence;
        r.variant = e.job.variant_id;
        r.qp = e.job.qp;
        r.bitrate_kbps = e.bitrate_kbps;
        if (!no_score) {
            r.vmaf = e.scores.at(MetricKind::vmaf);
            r.vmaf_neg = e.scores.at(MetricKind::vmaf_neg);
            r.psnr_y = e.scores.at(MetricKind::psnr_y);
            r.ms_ssim = e.scores.at(MetricKind::ms_ssim);
        }
        rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const csv::PerQpRow& a, const csv::PerQpRow& b) {
        return std::tie(a.sequence, a.variant, a.qp) < std::tie(b.sequence, b.variant, b.qp);
    });

    std::string out = out_path.empty() ? "per_qp.csv" : out_path;
    std::ostringstream text;
    csv::write(text, csv::to_table(rows));
    csv::write_file_atomic(out, text.str());
    std::printf("wrote %s (%zu rows)\n", out.c_str(), rows.size());

    if (!failures.empty()) {
        std::string fail_path = out + ".failures.txt";
        std::ostringstream ftext;
        for (const auto& f : failures) ftext << f << '\n';
        csv::write_file_atomic(fail_path, ftext.str());
        std::fprintf(stderr, "%zu job(s) failed; see %s\n", failures.size(),
                     fail_path.c_str());
        return kExitPartial;
    }
    return kExitOk;
}

// ------------------------------------------------------------- calibrate --

int cmd_calibrate(const std::string& video, int width, int height, int frames,
                  std::size_t n_patches, int patch_size, std::uint64_t seed,
                  const std::string& out_dir, const std::string& work_dir,
                  const std::string& config_path) {
    RunConfig cfg = load_config_or_default(config_path);
    auto ctx = harness::make_tool_context(cfg, work_dir.empty() ? "rdbench_work" : work_dir);
    if (ctx.ffmpeg_version.empty())
        throw config_error("encoder tool not available: " + ctx.ffmpeg);
    std::fprintf(stderr, "tool: %s\n", ctx.ffmpeg_version.c_str());

    fs::create_directories(out_dir);
    auto patches = proxy::extract_patches(video, width, height,
                                          static_cast<std::size_t>(frames), patch_size,
                                          n_patches, seed);
    auto run = proxy::run_calibration(patches, cfg.qp_grid, cfg.qp_quality, ctx,
                                      cfg.workers);
    for (const auto& f : run.failures) std::fprintf(stderr, "job failed: %s\n", f.c_str());
    if (run.measurements.empty()) throw job_error("all calibration jobs failed");
    std::size_t failed = run.failures.size();
    const auto& measurements = run.measurements;

    auto fit = proxy::calibrate(measurements);
    {
        std::ostringstream text;
        proxy::write_measurements_csv(text, measurements);
        csv::write_file_atomic(fs::path(out_dir) / "calibration_measurements.csv",
                               text.str());
    }
    {
        std::ostringstream text;
        proxy::write_fit_csv(text, fit);
        csv::write_file_atomic(fs::path(out_dir) / "calibration_fit.csv", text.str());
    }
    std::printf("patches: %zu (excluded: %zu)\n", fit.patches_total, fit.patches_excluded);
    std::printf("affine fit : bpp = %.3f * proxy + %.3f\n", fit.slope, fit.intercept);
    std::printf("spearman   : %.4f\n", fit.report.spearman_rho);
    std::printf("pearson    : %.4f\n", fit.report.pearson_r);
    std::printf("mae        : %.4f bpp\n", fit.report.mae);
    for (const auto& [qp, rho] : fit.per_qp_rho)
        std::printf("rho qp=%-3d: %.4f\n", qp, rho);
    std::printf("monotone_fraction: %.4f\n", fit.monotone_fraction);
    return failed == 0 ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rate-distortion benchmarking and calibration toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")->envname("RDBENCH_CONFIG");

    // bdrate
    auto* bdrate_cmd = app.add_subcommand("bdrate", "BD deltas from a per-QP CSV");
    std::string bd_csv, bd_out, bd_baseline;
    bdrate_cmd->add_option("csv", bd_csv, "per-QP CSV")->required();
    bdrate_cmd->add_option("--out", bd_out, "summary CSV output path");
    bdrate_cmd->add_option("--baseline", bd_baseline, "baseline variant name");

    // report
    auto* report_cmd = app.add_subcommand("report", "slice table from a summary CSV");
    std::string rp_csv, rp_slices, rp_aux, rp_out;
    report_cmd->add_option("csv", rp_csv, "summary CSV")->required();
    report_cmd->add_option("--slices", rp_slices,
                           "slice spec 'name:ex1+ex2;name2:...' (default: config)");
    report_cmd->add_option("--aux", rp_aux, "aux statistics CSV for classification");
    report_cmd->add_option("--out", rp_out, "slice table CSV output path");

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "failure taxonomy per sequence");
    std::string cl_csv, cl_aux;
    classify_cmd->add_option("csv", cl_csv, "summary CSV")->required();
    classify_cmd->add_option("--aux", cl_aux, "aux statistics CSV");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "SVG RD plots and BD scatter");
    std::string pl_csv, pl_metric = "vmaf", pl_out = "plots", pl_summary, pl_baseline;
    plot_cmd->add_option("csv", pl_csv, "per-QP CSV");
    plot_cmd->add_option("--metric", pl_metric, "vmaf|vmaf_neg|psnr_y|ms_ssim|all");
    plot_cmd->add_option("--out", pl_out, "output directory");
    plot_cmd->add_option("--summary", pl_summary, "summary CSV for the BD scatter");
    plot_cmd->add_option("--baseline", pl_baseline, "baseline variant name");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "encode+score a corpus manifest");
    std::string sw_manifest, sw_variant, sw_out, sw_work;
    bool sw_no_score = false, sw_keep = false;
    sweep_cmd->add_option("--manifest", sw_manifest, "corpus manifest")->required();
    sweep_cmd->add_option("--variant", sw_variant,
                          "'pre:<command>' or an encoder variant name");
    sweep_cmd->add_option("--out", sw_out, "per-QP CSV output path");
    sweep_cmd->add_option("--work-dir", sw_work, "intermediate directory");
    sweep_cmd->add_flag("--no-score", sw_no_score, "encode only, skip the metric pass");
    sweep_cmd->add_flag("--keep-intermediates", sw_keep,
                        "keep decoded YUVs and metric logs");

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "rate-proxy calibration per patch x QP");
    std::string ca_video, ca_out = "calibration", ca_work;
    int ca_w = 0, ca_h = 0, ca_frames = 0, ca_patch = 256;
    std::size_t ca_n = 50;
    std::uint64_t ca_seed = 1;
    cal_cmd->add_option("--video", ca_video, "raw 4:2:0 source video")->required();
    cal_cmd->add_option("--width", ca_w, "source width")->required();
    cal_cmd->add_option("--height", ca_h, "source height")->required();
    cal_cmd->add_option("--frames", ca_frames, "source frame count")->required();
    cal_cmd->add_option("--patches", ca_n, "number of patches");
    cal_cmd->add_option("--patch-size", ca_patch, "patch side (multiple of 16)");
    cal_cmd->add_option("--seed", ca_seed, "extraction seed");
    cal_cmd->add_option("--out-dir", ca_out, "output directory");
    cal_cmd->add_option("--work-dir", ca_work, "intermediate directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (bdrate_cmd->parsed())
            return cmd_bdrate(bd_csv, bd_out, bd_baseline, config_path);
        if (report_cmd->parsed())
            return cmd_report(rp_csv, rp_slices, rp_aux, rp_out, config_path);
        if (classify_cmd->parsed()) return cmd_classify(cl_csv, cl_aux, config_path);
        if (plot_cmd->parsed())
            return cmd_plot(pl_csv, pl_metric, pl_out, pl_summary, pl_baseline, config_path);
        if (sweep_cmd->parsed())
            return cmd_sweep(sw_manifest, sw_variant, sw_out, sw_work, sw_no_score, sw_keep,
                             config_path);
        if (cal_cmd->parsed())
            return cmd_calibrate(ca_video, ca_w, ca_h, ca_frames, ca_n, ca_patch, ca_seed,
                                 ca_out, ca_work, config_path);
    } catch (const parse_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const invalid_input_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const job_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        if (!e.tool_output.empty()) std::fprintf(stderr, "tool output:\n%s\n",
                                                 e.tool_output.c_str());
        return 1;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitUsage;
}
