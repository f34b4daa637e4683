#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "rdbench/errors.hpp"

namespace rdbench::proxy {

// One planar 4:2:0 8-bit frame (or patch). Y is width x height; chroma
// planes are half resolution in each dimension.
struct YuvPatch {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> y, cb, cr;

    void validate() const {
        if (width <= 0 || height <= 0 || width % 2 || height % 2)
            throw invalid_input_error("YuvPatch: bad geometry " + std::to_string(width) +
                                      "x" + std::to_string(height));
        auto cw = static_cast<std::size_t>(width / 2);
        auto ch = static_cast<std::size_t>(height / 2);
        if (y.size() != static_cast<std::size_t>(width) * height ||
            cb.size() != cw * ch || cr.size() != cw * ch)
            throw invalid_input_error("YuvPatch: plane sizes do not match geometry");
    }

    std::size_t frame_bytes() const {
        return static_cast<std::size_t>(width) * height * 3 / 2;
    }
};

inline std::size_t yuv420_frame_bytes(int width, int height) {
    return static_cast<std::size_t>(width) * height * 3 / 2;
}

// Reads frame `index` of a raw planar 4:2:0 8-bit file.
inline YuvPatch read_yuv_frame(const std::filesystem::path& path, int width, int height,
                               std::size_t index = 0) {
    YuvPatch p;
    p.width = width;
    p.height = height;
    std::size_t fb = yuv420_frame_bytes(width, height);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input_error("cannot open " + path.string());
    in.seekg(static_cast<std::streamoff>(fb * index));
    p.y.resize(static_cast<std::size_t>(width) * height);
    p.cb.resize(static_cast<std::size_t>(width / 2) * (height / 2));
    p.cr.resize(p.cb.size());
    in.read(reinterpret_cast<char*>(p.y.data()), static_cast<std::streamsize>(p.y.size()));
    in.read(reinterpret_cast<char*>(p.cb.data()), static_cast<std::streamsize>(p.cb.size()));
    in.read(reinterpret_cast<char*>(p.cr.data()), static_cast<std::streamsize>(p.cr.size()));
    if (!in) throw invalid_input_error("short read from " + path.string() + " at frame " +
                                       std::to_string(index));
    return p;
}

inline void write_yuv_frame(std::ostream& out, const YuvPatch& p) {
    out.write(reinterpret_cast<const char*>(p.y.data()),
              static_cast<std::streamsize>(p.y.size()));
    out.write(reinterpret_cast<const char*>(p.cb.data()),
              static_cast<std::streamsize>(p.cb.size()));
    out.write(reinterpret_cast<const char*>(p.cr.data()),
              static_cast<std::streamsize>(p.cr.size()));
}

// Writes a patch as `<stem>_<w>x<h>.yuv` so geometry travels in the filename.
inline std::filesystem::path write_patch_file(const std::filesystem::path& dir,
                                              const std::string& stem, const YuvPatch& p) {
    auto path = dir / (stem + "_" + std::to_string(p.width) + "x" +
                       std::to_string(p.height) + ".yuv");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_input_error("cannot write " + path.string());
    write_yuv_frame(out, p);
    return path;
}

// Crops a sub-patch; offsets must be even to keep 4:2:0 alignment.
inline YuvPatch crop(const YuvPatch& src, int x0, int y0, int w, int h) {
    if (x0 % 2 || y0 % 2 || w % 2 || h % 2 || x0 < 0 || y0 < 0 || x0 + w > src.width ||
        y0 + h > src.height)
        throw invalid_input_error("crop: bad window");
    YuvPatch p;
    p.width = w;
    p.height = h;
    p.y.resize(static_cast<std::size_t>(w) * h);
    p.cb.resize(static_cast<std::size_t>(w / 2) * (h / 2));
    p.cr.resize(p.cb.size());
    for (int r = 0; r < h; ++r)
        std::copy_n(src.y.data() + static_cast<std::size_t>(y0 + r) * src.width + x0, w,
                    p.y.data() + static_cast<std::size_t>(r) * w);
    int cw = w / 2, ch = h / 2, scw = src.width / 2;
    for (int r = 0; r < ch; ++r) {
        auto off = static_cast<std::size_t>(y0 / 2 + r) * scw + x0 / 2;
        std::copy_n(src.cb.data() + off, cw, p.cb.data() + static_cast<std::size_t>(r) * cw);
        std::copy_n(src.cr.data() + off, cw, p.cr.data() + static_cast<std::size_t>(r) * cw);
    }
    return p;
}

// Deterministic seeded random crops from a raw 4:2:0 video. The same
// (file, geometry, count, seed) always yields the same patch set.
inline std::vector<YuvPatch> extract_patches(const std::filesystem::path& path, int width,
                                             int height, std::size_t frames,
                                             int patch_size, std::size_t count,
                                             std::uint64_t seed) {
    if (patch_size % 16)
        throw invalid_input_error("patch size must be a multiple of 16");
    if (width < patch_size || height < patch_size)
        throw invalid_input_error("source smaller than patch size");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> frame_dist(0, frames - 1);
    std::uniform_int_distribution<int> x_dist(0, (width - patch_size) / 2);
    std::uniform_int_distribution<int> y_dist(0, (height - patch_size) / 2);
    std::vector<YuvPatch> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t f = frame_dist(rng);
        int x0 = 2 * x_dist(rng);
        int y0 = 2 * y_dist(rng);
        YuvPatch frame = read_yuv_frame(path, width, height, f);
        out.push_back(crop(frame, x0, y0, patch_size, patch_size));
    }
    return out;
}

}  // namespace rdbench::proxy
