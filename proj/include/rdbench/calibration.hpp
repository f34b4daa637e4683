#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rdbench/errors.hpp"
#include "rdbench/harness.hpp"
#include "rdbench/rate_proxy.hpp"
#include "rdbench/yuv.hpp"

namespace rdbench::proxy {

namespace fs = std::filesystem;

// Encodes one patch as a single-frame sequence with the real encoder and
// returns encoded bits per luma pixel. Encoder failures propagate with the
// captured diagnostics; a zero-byte stream is an error, never bpp 0.
inline double measure_real_bpp(const YuvPatch& patch, int qp,
                               const harness::ToolContext& ctx,
                               const std::string& patch_id = "patch") {
    patch.validate();
    fs::create_directories(ctx.work_dir);
    // one raw file per (patch, qp) job so parallel encodes never share input
    auto path = write_patch_file(ctx.work_dir, patch_id + "_q" + std::to_string(qp), patch);

    harness::SequenceInfo seq;
    seq.name = patch_id;
    seq.path = path;
    seq.width = patch.width;
    seq.height = patch.height;
    seq.fps = 25.0;  // nominal; bits-per-pixel does not depend on it
    seq.frames = 1;

    harness::EncodeJob job;
    job.sequence = seq;
    job.variant_id = "calib";
    job.qp = qp;
    auto enc = harness::encode(job, ctx);

    std::error_code ec;
    auto bytes = fs::file_size(enc.stream_path, ec);
    if (ec || bytes == 0) throw job_error("calibration encode produced an empty stream");
    return 8.0 * static_cast<double>(bytes) /
           (static_cast<double>(patch.width) * patch.height * seq.frames);
}

// The calibration pipeline: every (patch, qp) pair gets a proxy score and a
// real-encoder bpp, run on the harness pool (each encode stays
// single-threaded). Failed jobs are dropped with their errors returned.
struct CalibrationRun {
    std::vector<RateMeasurement> measurements;
    std::vector<std::string> failures;
};

inline CalibrationRun run_calibration(const std::vector<YuvPatch>& patches,
                                      const std::vector<int>& qp_grid,
                                      const QpQualityMap& map,
                                      const harness::ToolContext& ctx, int workers = 4) {
    struct Item {
        std::size_t patch_index;
        int qp;
        std::string id;
    };
    std::vector<Item> items;
    for (std::size_t i = 0; i < patches.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "patch%04zu", i);
        for (int qp : qp_grid) items.push_back({i, qp, name});
    }

    CalibrationRun run;
    std::vector<RateMeasurement> ms(items.size());
    auto errors = harness::run_parallel(items.size(), workers, [&](std::size_t k) {
        const auto& item = items[k];
        RateMeasurement m;
        m.patch_id = item.id;
        m.qp = item.qp;
        m.proxy_raw = rate_score(patches[item.patch_index], item.qp, map);
        m.real_bpp = measure_real_bpp(patches[item.patch_index], item.qp, ctx, item.id);
        ms[k] = std::move(m);
    });
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (errors[k].empty()) {
            run.measurements.push_back(std::move(ms[k]));
        } else {
            run.failures.push_back(items[k].id + "/qp" + std::to_string(items[k].qp) + ": " +
                                   errors[k]);
        }
    }
    return run;
}

}  // namespace rdbench::proxy
