#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "rdbench/quant.hpp"

using namespace rdbench;
using namespace rdbench::proxy;

TEST_CASE("quality 50 reproduces the base tables") {
    auto luma = scale_table(kBaseLumaTable, 50);
    auto chroma = scale_table(kBaseChromaTable, 50);
    for (int i = 0; i < 64; ++i) {
        REQUIRE(luma[i] == kBaseLumaTable[i]);
        REQUIRE(chroma[i] == kBaseChromaTable[i]);
    }
}

TEST_CASE("quality 100 clamps every entry to 1") {
    auto luma = scale_table(kBaseLumaTable, 100);
    auto chroma = scale_table(kBaseChromaTable, 100);
    for (int i = 0; i < 64; ++i) {
        REQUIRE(luma[i] == 1);
        REQUIRE(chroma[i] == 1);
    }
}

TEST_CASE("qp 22 table matches the entrywise-formula oracle") {
    QpQualityMap map;
    int quality = map.quality_for(22);
    // default anchors: (18 -> 75), (40 -> 10), linear, rounded
    REQUIRE(quality == 63);
    int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;  // 5000/63 = 79
    auto tables = quant_table(22, map);
    for (int i = 0; i < 64; ++i) {
        int expect_l = std::clamp((kBaseLumaTable[i] * scale + 50) / 100, 1, 255);
        int expect_c = std::clamp((kBaseChromaTable[i] * scale + 50) / 100, 1, 255);
        REQUIRE(tables.luma[i] == expect_l);
        REQUIRE(tables.chroma[i] == expect_c);
    }
}

TEST_CASE("qp out of range is rejected") {
    CHECK_THROWS_AS(quant_table(17), invalid_input_error);
    CHECK_THROWS_AS(quant_table(41), invalid_input_error);
    CHECK_NOTHROW(quant_table(18));
    CHECK_NOTHROW(quant_table(40));
}

TEST_CASE("default qp-to-quality map is strictly decreasing") {
    QpQualityMap map;
    int prev = map.quality_for(kQpMin);
    for (int qp = kQpMin + 1; qp <= kQpMax; ++qp) {
        int q = map.quality_for(qp);
        REQUIRE(q < prev);
        prev = q;
    }
}

TEST_CASE("tables are entrywise non-decreasing in qp") {
    QpQualityMap map;
    auto prev = quant_table(kQpMin, map);
    for (int qp = kQpMin + 1; qp <= kQpMax; ++qp) {
        auto cur = quant_table(qp, map);
        for (int i = 0; i < 64; ++i) {
            REQUIRE(cur.luma[i] >= prev.luma[i]);
            REQUIRE(cur.chroma[i] >= prev.chroma[i]);
        }
        prev = cur;
    }
}
