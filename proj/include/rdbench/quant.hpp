#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "rdbench/errors.hpp"

namespace rdbench::proxy {

// Base luminance quantization table (Annex K).
inline constexpr std::array<int, 64> kBaseLumaTable{
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

// Base chrominance quantization table (Annex K).
inline constexpr std::array<int, 64> kBaseChromaTable{
    17, 18, 24, 47, 99, 99, 99, 99,  //
    18, 21, 26, 66, 99, 99, 99, 99,  //
    24, 26, 56, 99, 99, 99, 99, 99,  //
    47, 66, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99};

inline constexpr int kQpMin = 18;
inline constexpr int kQpMax = 40;

// Encoder QP -> JPEG quality. A strictly decreasing piecewise-linear map,
// anchored by default at (18 -> 75) and (40 -> 10) and rounded to the
// nearest integer. Any strictly decreasing anchor pair preserves cross-QP
// rank structure; the anchors are a config knob, not a constant.
struct QpQualityMap {
    int qp_lo = 18;
    int quality_at_lo = 75;
    int qp_hi = 40;
    int quality_at_hi = 10;

    int quality_for(int qp) const {
        if (qp < kQpMin || qp > kQpMax)
            throw invalid_input_error("qp out of range [18, 40]: " + std::to_string(qp));
        double t = static_cast<double>(qp - qp_lo) / static_cast<double>(qp_hi - qp_lo);
        double q = quality_at_lo + t * (quality_at_hi - quality_at_lo);
        int quality = static_cast<int>(std::lround(q));
        return std::clamp(quality, 1, 100);
    }
};

// Standard quality-to-scale convention: scale = 5000/q for q < 50,
// 200 - 2q otherwise; entries (base*scale + 50)/100, clamped to [1, 255].
inline std::array<int, 64> scale_table(const std::array<int, 64>& base, int quality) {
    if (quality < 1 || quality > 100)
        throw invalid_input_error("quality out of range [1, 100]");
    int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    std::array<int, 64> out{};
    for (int i = 0; i < 64; ++i)
        out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
    return out;
}

struct QuantTables {
    std::array<int, 64> luma{};
    std::array<int, 64> chroma{};
};

inline QuantTables quant_table(int qp, const QpQualityMap& map = {}) {
    int quality = map.quality_for(qp);  // range-checks qp
    return QuantTables{scale_table(kBaseLumaTable, quality),
                       scale_table(kBaseChromaTable, quality)};
}

}  // namespace rdbench::proxy
