#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rdbench/config.hpp"
#include "rdbench/digest.hpp"
#include "rdbench/errors.hpp"
#include "rdbench/rd_types.hpp"
#include "rdbench/subprocess.hpp"

namespace rdbench::harness {

namespace fs = std::filesystem;

// One corpus entry: a raw planar 4:2:0 8-bit file plus its geometry.
struct SequenceInfo {
    std::string name;
    fs::path path;
    int width = 0;
    int height = 0;
    double fps = 0.0;
    int frames = 0;
    std::string pix_fmt = "yuv420p";

    std::uintmax_t raw_bytes() const {
        return static_cast<std::uintmax_t>(width) * height * 3 / 2 *
               static_cast<std::uintmax_t>(frames);
    }

    // The declared geometry must match the file's byte size exactly.
    void validate_file() const {
        if (pix_fmt != "yuv420p")
            throw invalid_input_error(name + ": only yuv420p is supported, got " + pix_fmt);
        std::error_code ec;
        auto size = fs::file_size(path, ec);
        if (ec) throw invalid_input_error(name + ": cannot stat " + path.string());
        if (size != raw_bytes())
            throw invalid_input_error(
                name + ": geometry mismatch: file is " + std::to_string(size) +
                " bytes, declared " + std::to_string(raw_bytes()));
    }
};

// Manifest format: one sequence per line,
//   name path width height fps frames pix_fmt
// with '#' comments and blank lines ignored.
inline std::vector<SequenceInfo> parse_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input_error("cannot open manifest: " + path.string());
    std::vector<SequenceInfo> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        SequenceInfo s;
        std::string p;
        if (!(is >> s.name)) continue;  // blank
        if (!(is >> p >> s.width >> s.height >> s.fps >> s.frames))
            throw parse_error("manifest: expected 'name path width height fps frames "
                              "[pix_fmt]'",
                              line_no);
        if (!(is >> s.pix_fmt)) s.pix_fmt = "yuv420p";
        s.path = path.parent_path() / p;
        if (s.width <= 0 || s.height <= 0 || s.fps <= 0.0 || s.frames <= 0)
            throw parse_error("manifest: non-positive geometry for " + s.name, line_no);
        out.push_back(std::move(s));
    }
    return out;
}

enum class EncoderVariant {
    x264_medium,
    x264_tune_psnr,
    x264_tune_ssim,
    x264_hqdn3d,
    x264_unsharp,
    x265_medium,
};

constexpr const char* variant_name(EncoderVariant v) {
    switch (v) {
        case EncoderVariant::x264_medium: return "x264_medium";
        case EncoderVariant::x264_tune_psnr: return "x264_tune_psnr";
        case EncoderVariant::x264_tune_ssim: return "x264_tune_ssim";
        case EncoderVariant::x264_hqdn3d: return "x264_hqdn3d";
        case EncoderVariant::x264_unsharp: return "x264_unsharp";
        case EncoderVariant::x265_medium: return "x265_medium";
    }
    return "?";
}

inline EncoderVariant parse_encoder_variant(const std::string& s) {
    for (EncoderVariant v :
         {EncoderVariant::x264_medium, EncoderVariant::x264_tune_psnr,
          EncoderVariant::x264_tune_ssim, EncoderVariant::x264_hqdn3d,
          EncoderVariant::x264_unsharp, EncoderVariant::x265_medium})
        if (s == variant_name(v)) return v;
    throw config_error("unknown encoder variant: " + s);
}

struct EncodeJob {
    SequenceInfo sequence;  // the raw input of this leg
    std::string variant_id;
    int qp = 0;
    EncoderVariant encoder = EncoderVariant::x264_medium;
    std::optional<std::string> preprocessor;  // command template, leg 2 only
};

struct ScoredEncode {
    EncodeJob job;
    double bitrate_kbps = 0.0;
    std::string stream_digest;  // md5 of the container file
    std::map<MetricKind, double> scores;
    fs::path stream_path;
    bool from_cache = false;
};

// Resolved tool paths plus run-wide knobs. Every run log records the exact
// version string; the determinism contract is version-dependent.
struct ToolContext {
    std::string ffmpeg;
    std::string ffmpeg_version;
    std::string vmaf_filter;  // -lavfi value; {LOG} is replaced per score run
    fs::path work_dir;
    fs::path cache_dir;  // empty disables the cache
    bool keep_intermediates = false;
};

// Single libvmaf v3 pass extracting all four metrics with per-frame JSON.
// Built-in model syntax (libvmaf >= 2); override via config for other builds.
inline std::string default_vmaf_filter() {
    return "libvmaf=model=version=vmaf_v0.6.1\\:name=vmaf|"
           "version=vmaf_v0.6.1neg\\:name=vmaf_neg:"
           "feature=name=psnr|name=float_ms_ssim:log_fmt=json:log_path={LOG}";
}

// Discovery order: explicit override, RDBENCH_FFMPEG, then PATH.
inline std::string find_ffmpeg(const std::string& override_path = {}) {
    if (!override_path.empty()) return override_path;
    if (const char* env = std::getenv("RDBENCH_FFMPEG"); env && *env) return env;
    return "ffmpeg";
}

// First line of `<tool> -version`; empty string when the tool cannot run.
inline std::string tool_version(const std::string& tool) {
    try {
        auto r = run_command({tool, "-version"});
        if (r.exit_code != 0) return {};
        auto nl = r.out.find('\n');
        return nl == std::string::npos ? r.out : r.out.substr(0, nl);
    } catch (const error&) {
        return {};
    }
}

inline bool tool_available(const std::string& tool) { return !tool_version(tool).empty(); }

inline ToolContext make_tool_context(const RunConfig& cfg, const fs::path& work_dir) {
    ToolContext ctx;
    ctx.ffmpeg = find_ffmpeg(cfg.ffmpeg_path);
    ctx.ffmpeg_version = tool_version(ctx.ffmpeg);
    ctx.vmaf_filter = cfg.vmaf_filter.empty() ? default_vmaf_filter() : cfg.vmaf_filter;
    ctx.work_dir = work_dir;
    ctx.cache_dir = cfg.cache_dir;
    ctx.keep_intermediates = cfg.keep_intermediates;
    fs::create_directories(ctx.work_dir);
    if (!ctx.cache_dir.empty()) fs::create_directories(ctx.cache_dir);
    return ctx;
}

// fps rendered without a trailing fraction when integral ("120", "29.97").
inline std::string fps_string(double fps) {
    if (std::abs(fps - std::round(fps)) < 1e-9)
        return std::to_string(static_cast<long long>(std::llround(fps)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", fps);
    std::string s = buf;
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
}

// The canonical constant-QP command. The baseline template is fixed; panel
// variants insert their tune flag or filter at default parameters, and the
// x265 row swaps the codec. -threads 1 is load-bearing: multithreaded
// encoding is not bit-exact run to run.
inline std::vector<std::string> encode_argv(const EncodeJob& job, const fs::path& input,
                                            const fs::path& output,
                                            const std::string& ffmpeg) {
    const SequenceInfo& seq = job.sequence;
    std::vector<std::string> argv{
        ffmpeg, "-y", "-f", "rawvideo", "-pix_fmt", "yuv420p",
        "-s", std::to_string(seq.width) + "x" + std::to_string(seq.height),
        "-r", fps_string(seq.fps), "-i", input.string(),
        "-c:v", "libx264", "-qp", std::to_string(job.qp), "-preset", "medium"};
    switch (job.encoder) {
        case EncoderVariant::x264_medium: break;
        case EncoderVariant::x264_tune_psnr:
            argv.insert(argv.end(), {"-tune", "psnr"});
            break;
        case EncoderVariant::x264_tune_ssim:
            argv.insert(argv.end(), {"-tune", "ssim"});
            break;
        case EncoderVariant::x264_hqdn3d:
            argv.insert(argv.end(), {"-vf", "hqdn3d"});
            break;
        case EncoderVariant::x264_unsharp:
            argv.insert(argv.end(), {"-vf", "unsharp"});
            break;
        case EncoderVariant::x265_medium: {
            auto it = std::find(argv.begin(), argv.end(), "libx264");
            *it = "libx265";
            break;
        }
    }
    argv.insert(argv.end(),
                {"-pix_fmt", "yuv420p", "-an", "-threads", "1", "-v", "error",
                 output.string()});
    return argv;
}

// Content hash of (input digest, full command string, tool version). Any
// change in input bytes, command, or tool build invalidates the entry.
inline std::string cache_key(const EncodeJob& job, const std::string& input_digest,
                             const std::string& version) {
    auto argv = encode_argv(job, "{IN}", "{OUT}", "ffmpeg");
    Md5 h;
    h.update(input_digest);
    h.update(std::string_view{"\n"});
    h.update(command_string(argv));
    h.update(std::string_view{"\n"});
    h.update(version);
    return h.hex();
}

namespace detail {

struct CacheEntry {
    double bitrate_kbps = 0.0;
    std::string stream_digest;
};

inline std::optional<CacheEntry> cache_lookup(const ToolContext& ctx, const std::string& key,
                                              const fs::path& stream_out) {
    if (ctx.cache_dir.empty()) return std::nullopt;
    fs::path meta = ctx.cache_dir / (key + ".json");
    fs::path bin = ctx.cache_dir / (key + ".bin");
    if (!fs::exists(meta) || !fs::exists(bin)) return std::nullopt;
    std::ifstream in(meta);
    nlohmann::json j;
    try {
        in >> j;
        CacheEntry e;
        e.bitrate_kbps = j.at("bitrate_kbps").get<double>();
        e.stream_digest = j.at("stream_digest").get<std::string>();
        fs::copy_file(bin, stream_out, fs::copy_options::overwrite_existing);
        return e;
    } catch (const std::exception&) {
        return std::nullopt;  // unreadable entry = miss
    }
}

inline void cache_store(const ToolContext& ctx, const std::string& key,
                        const fs::path& stream, const CacheEntry& e,
                        const std::string& command, const std::string& version) {
    if (ctx.cache_dir.empty()) return;
    static std::atomic<unsigned> counter{0};
    std::string unique = "." + std::to_string(::getpid()) + "." +
                         std::to_string(counter.fetch_add(1)) + ".tmp";
    fs::path bin = ctx.cache_dir / (key + ".bin");
    fs::path meta = ctx.cache_dir / (key + ".json");
    fs::path bin_tmp = bin;
    bin_tmp += unique;
    fs::copy_file(stream, bin_tmp, fs::copy_options::overwrite_existing);
    fs::rename(bin_tmp, bin);  // atomic publish
    nlohmann::json j{{"bitrate_kbps", e.bitrate_kbps},
                     {"stream_digest", e.stream_digest},
                     {"command", command},
                     {"tool_version", version}};
    fs::path meta_tmp = meta;
    meta_tmp += unique;
    {
        std::ofstream out(meta_tmp);
        out << j.dump(2) << '\n';
    }
    fs::rename(meta_tmp, meta);
}

}  // namespace detail

// Runs the encoder for one job. Never a silent skip: a missing tool, nonzero
// exit, bad geometry, or an empty output stream all raise job_error with the
// captured tool output.
inline ScoredEncode encode(const EncodeJob& job, const ToolContext& ctx) {
    job.sequence.validate_file();
    fs::path out = ctx.work_dir / (job.sequence.name + "_" + job.variant_id + "_qp" +
                                   std::to_string(job.qp) + ".mp4");
    auto argv = encode_argv(job, job.sequence.path, out, ctx.ffmpeg);
    std::string cmd = command_string(argv);

    ScoredEncode result;
    result.job = job;
    result.stream_path = out;

    std::string input_digest = md5_file_hex(job.sequence.path);
    std::string key = cache_key(job, input_digest, ctx.ffmpeg_version);
    if (auto hit = detail::cache_lookup(ctx, key, out)) {
        result.bitrate_kbps = hit->bitrate_kbps;
        result.stream_digest = hit->stream_digest;
        result.from_cache = true;
        return result;
    }

    CommandResult r;
    try {
        r = run_command(argv);
    } catch (const job_error& e) {
        throw job_error("encode failed to launch: " + cmd + ": " + e.what(), e.tool_output);
    }
    if (r.exit_code != 0)
        throw job_error("encode exited " + std::to_string(r.exit_code) + ": " + cmd,
                        r.err + r.out);
    std::error_code ec;
    auto bytes = fs::file_size(out, ec);
    if (ec || bytes == 0)
        throw job_error("encode produced no output stream: " + cmd, r.err + r.out);

    result.bitrate_kbps = 8.0 * static_cast<double>(bytes) * job.sequence.fps /
                          (static_cast<double>(job.sequence.frames) * 1000.0);
    result.stream_digest = md5_file_hex(out);
    detail::cache_store(ctx, key,
                        out, {result.bitrate_kbps, result.stream_digest}, cmd,
                        ctx.ffmpeg_version);
    return result;
}

// Decodes a stream back to raw 4:2:0 and checks the frame count against the
// reference geometry (hard error on mismatch).
inline fs::path decode_to_yuv(const ScoredEncode& enc, const ToolContext& ctx) {
    fs::path out = enc.stream_path;
    out += ".dec.yuv";
    std::vector<std::string> argv{ctx.ffmpeg, "-y",      "-i", enc.stream_path.string(),
                                  "-f",       "rawvideo", "-pix_fmt", "yuv420p",
                                  "-v",       "error",    out.string()};
    auto r = run_command(argv);
    if (r.exit_code != 0)
        throw job_error("decode exited " + std::to_string(r.exit_code) + ": " +
                            command_string(argv),
                        r.err + r.out);
    std::error_code ec;
    auto bytes = fs::file_size(out, ec);
    if (ec || bytes != enc.job.sequence.raw_bytes())
        throw job_error("decode frame-count mismatch: got " +
                        std::to_string(ec ? 0 : bytes) + " bytes, want " +
                        std::to_string(enc.job.sequence.raw_bytes()));
    return out;
}

namespace detail {

// Pulls one metric series out of a libvmaf JSON log, tolerating the key
// spellings of both the v2+ and v1 log formats.
inline std::optional<double> frame_metric(const nlohmann::json& metrics, MetricKind m) {
    static const std::map<MetricKind, std::vector<std::string>> keys{
        {MetricKind::vmaf, {"vmaf"}},
        {MetricKind::vmaf_neg, {"vmaf_neg", "vmaf neg"}},
        {MetricKind::psnr_y, {"psnr_y", "psnr"}},
        {MetricKind::ms_ssim, {"float_ms_ssim", "ms_ssim"}},
    };
    for (const auto& k : keys.at(m))
        if (metrics.contains(k)) return metrics[k].get<double>();
    return std::nullopt;
}

}  // namespace detail

// Parses a per-frame libvmaf JSON log into clip scores: arithmetic mean over
// frames for each of the four metrics. Missing metrics are a hard error (the
// single-pass contract requires both VMAF models plus PSNR and MS-SSIM).
inline std::map<MetricKind, double> parse_vmaf_log(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw job_error(std::string("unparseable metric log: ") + e.what());
    }
    if (!j.contains("frames") || !j["frames"].is_array() || j["frames"].empty())
        throw job_error("metric log has no frames");
    std::map<MetricKind, double> sums;
    std::size_t n = 0;
    for (const auto& frame : j["frames"]) {
        if (!frame.contains("metrics")) throw job_error("metric log frame lacks metrics");
        ++n;
        for (MetricKind m : all_metrics) {
            auto v = detail::frame_metric(frame["metrics"], m);
            if (!v)
                throw job_error(std::string("metric log missing ") + metric_name(m) +
                                " (check model availability in the libvmaf build)");
            sums[m] += *v;
        }
    }
    std::map<MetricKind, double> out;
    for (auto& [m, s] : sums) out[m] = s / static_cast<double>(n);
    return out;
}

// Scores one encode against the original raw reference in a single metric
// pass and fills in the clip-level scores.
inline ScoredEncode score(const SequenceInfo& reference, ScoredEncode enc,
                          const ToolContext& ctx) {
    fs::path decoded = decode_to_yuv(enc, ctx);
    fs::path log = enc.stream_path;
    log += ".vmaf.json";

    std::string filter = ctx.vmaf_filter;
    if (auto pos = filter.find("{LOG}"); pos != std::string::npos)
        filter.replace(pos, 5, log.string());

    std::string size = std::to_string(reference.width) + "x" +
                       std::to_string(reference.height);
    std::string rate = fps_string(reference.fps);
    std::vector<std::string> argv{ctx.ffmpeg, "-y",
                                  "-f", "rawvideo", "-pix_fmt", "yuv420p", "-s", size,
                                  "-r", rate, "-i", decoded.string(),
                                  "-f", "rawvideo", "-pix_fmt", "yuv420p", "-s", size,
                                  "-r", rate, "-i", reference.path.string(),
                                  "-lavfi", filter, "-f", "null", "-"};
    auto r = run_command(argv);
    if (r.exit_code != 0)
        throw job_error("metric pass exited " + std::to_string(r.exit_code) + ": " +
                            command_string(argv),
                        r.err + r.out);
    std::ifstream in(log);
    if (!in) throw job_error("metric pass wrote no log: " + log.string());
    std::stringstream buf;
    buf << in.rdbuf();
    enc.scores = parse_vmaf_log(buf.str());
    if (!ctx.keep_intermediates) {
        std::error_code ec;
        fs::remove(decoded, ec);
        fs::remove(log, ec);
    }
    return enc;
}

// Applies the preprocessor contract `CMD <in.yuv> <out.yuv> <width> <height>`.
// Exit 0 and byte-identical geometry required; a pre-encoder must not resize.
inline SequenceInfo run_preprocessor(const std::string& cmd_template,
                                     const SequenceInfo& input, const ToolContext& ctx) {
    SequenceInfo out = input;
    out.name = input.name;
    out.path = ctx.work_dir / (input.name + ".preprocessed.yuv");
    auto argv = split_command(cmd_template);
    if (argv.empty()) throw config_error("empty preprocessor command");
    argv.push_back(input.path.string());
    argv.push_back(out.path.string());
    argv.push_back(std::to_string(input.width));
    argv.push_back(std::to_string(input.height));
    auto r = run_command(argv);
    if (r.exit_code != 0)
        throw job_error("preprocessor exited " + std::to_string(r.exit_code) + ": " +
                            command_string(argv),
                        r.err + r.out);
    std::error_code ec;
    auto bytes = fs::file_size(out.path, ec);
    if (ec || bytes != input.raw_bytes())
        throw job_error("preprocessor changed geometry: got " +
                        std::to_string(ec ? 0 : bytes) + " bytes, want " +
                        std::to_string(input.raw_bytes()) + " (resizing is not allowed)");
    return out;
}

// Runs fn(0..n_jobs-1) on a bounded pool. Returns one error string per
// failed job ("" for successes); jobs never share mutable state.
template <class Fn>
inline std::vector<std::string> run_parallel(std::size_t n_jobs, int workers, Fn&& fn) {
    std::vector<std::string> errors(n_jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n_jobs) return;
            try {
                fn(i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(n_jobs)));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return errors;
}

struct TwoLegResult {
    RDCurve baseline;
    std::optional<RDCurve> variant;
    std::vector<ScoredEncode> encodes;
};

// The measurement protocol: leg 1 encodes the original at every QP; leg 2
// runs the preprocessor once and encodes its output at every QP. Both legs
// are scored against the original raw input. The only variable is the
// preprocessor.
inline TwoLegResult run_two_legs(const SequenceInfo& sequence,
                                 const std::optional<std::string>& preprocessor_cmd,
                                 const ToolContext& ctx, const std::vector<int>& qp_grid,
                                 int workers = 4, bool with_scores = true) {
    sequence.validate_file();
    std::vector<EncodeJob> jobs;
    for (int qp : qp_grid) {
        EncodeJob j;
        j.sequence = sequence;
        j.variant_id = "baseline";
        j.qp = qp;
        jobs.push_back(std::move(j));
    }
    if (preprocessor_cmd) {
        SequenceInfo pre = run_preprocessor(*preprocessor_cmd, sequence, ctx);
        for (int qp : qp_grid) {
            EncodeJob j;
            j.sequence = pre;
            j.sequence.name = sequence.name;  // same sequence identity
            j.variant_id = "variant";
            j.qp = qp;
            j.preprocessor = preprocessor_cmd;
            jobs.push_back(std::move(j));
        }
    }

    std::vector<ScoredEncode> encodes(jobs.size());
    auto errors = run_parallel(jobs.size(), workers, [&](std::size_t i) {
        ScoredEncode e = encode(jobs[i], ctx);
        if (with_scores) e = score(sequence, std::move(e), ctx);
        encodes[i] = std::move(e);
    });
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw job_error("job " + jobs[i].variant_id + "/qp" +
                                std::to_string(jobs[i].qp) + ": " + errors[i]);

    TwoLegResult result;
    auto fill = [&](RDCurve& curve, const std::string& variant_id) {
        curve.sequence_id = sequence.name;
        curve.variant_id = variant_id;
        for (const auto& e : encodes) {
            if (e.job.variant_id != variant_id) continue;
            RDPoint p;
            p.qp = e.job.qp;
            p.bitrate_kbps = e.bitrate_kbps;
            p.scores = e.scores;
            curve.points.push_back(p);
        }
        std::sort(curve.points.begin(), curve.points.end(),
                  [](const RDPoint& a, const RDPoint& b) { return a.qp < b.qp; });
    };
    fill(result.baseline, "baseline");
    if (preprocessor_cmd) {
        result.variant.emplace();
        fill(*result.variant, "variant");
    }
    result.encodes = std::move(encodes);
    return result;
}

}  // namespace rdbench::harness
