#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rdbench/rate_proxy.hpp"
#include "test_util.hpp"

using namespace rdbench;
using namespace rdbench::proxy;

namespace {

// Composed oracle for one 8x8 luma tile: naive double-sum DCT, entrywise
// quantization with ties away from zero, direct log sum. Chroma assumed flat.
double tile_score_oracle(const std::array<double, 64>& tile, int qp) {
    const double pi = std::acos(-1.0);
    QuantTables tables = quant_table(qp);
    double logsum = 0.0;
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double au = u == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
            double av = v == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
            double s = 0.0;
            for (int m = 0; m < 8; ++m)
                for (int n = 0; n < 8; ++n)
                    s += (tile[m * 8 + n] - 128.0) * std::cos((2 * m + 1) * u * pi / 16.0) *
                         std::cos((2 * n + 1) * v * pi / 16.0);
            double coeff = au * av * s;
            double q = std::round(coeff / tables.luma[u * 8 + v]);
            logsum += std::log(1.0 + std::abs(q));
        }
    // flat-128 chroma planes contribute zero to the log sum but do count
    // toward the coefficient total: 64 luma + 2 * 16 chroma samples
    return logsum / 96.0;
}

YuvPatch tile_patch(const std::array<double, 64>& tile) {
    YuvPatch p;
    p.width = 8;
    p.height = 8;
    p.y.resize(64);
    for (int i = 0; i < 64; ++i) p.y[i] = static_cast<std::uint8_t>(tile[i]);
    p.cb.assign(16, 128);
    p.cr.assign(16, 128);
    return p;
}

}  // namespace

TEST_CASE("flat 128 patch scores exactly zero") {
    YuvPatch p;
    p.width = 32;
    p.height = 32;
    p.y.assign(32 * 32, 128);
    p.cb.assign(16 * 16, 128);
    p.cr.assign(16 * 16, 128);
    for (int qp : canonical_qp_grid) REQUIRE(rate_score(p, qp) == 0.0);
}

TEST_CASE("checkerboard tile matches the composed naive oracle") {
    std::array<double, 64> tile{};
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) tile[r * 8 + c] = ((r + c) % 2) ? 200.0 : 56.0;
    auto p = tile_patch(tile);
    for (int qp : canonical_qp_grid)
        REQUIRE(rate_score(p, qp) == Catch::Approx(tile_score_oracle(tile, qp)).margin(1e-10));
}

TEST_CASE("random tiles match the composed naive oracle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.0, 255.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::array<double, 64> tile{};
        for (auto& v : tile) v = std::floor(d(rng));
        auto p = tile_patch(tile);
        REQUIRE(rate_score(p, 27) == Catch::Approx(tile_score_oracle(tile, 27)).margin(1e-10));
    }
}

TEST_CASE("rate_score rejects non multiple-of-8 dimensions") {
    YuvPatch p;
    p.width = 20;
    p.height = 12;
    p.y.assign(20 * 12, 128);
    p.cb.assign(10 * 6, 128);
    p.cr.assign(10 * 6, 128);
    CHECK_THROWS_AS(rate_score(p, 27), invalid_input_error);
}

TEST_CASE("rate_score is monotone non-increasing in qp over a 100-patch suite") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto p = testutil::synthetic_patch(seed, 32, 32);
        double prev = rate_score(p, kQpMin);
        for (int qp = kQpMin + 1; qp <= kQpMax; ++qp) {
            double cur = rate_score(p, qp);
            REQUIRE(cur <= prev + 1e-15);
            prev = cur;
        }
    }
}

TEST_CASE("rate_score is bit-exact under whole-block permutation") {
    auto swap_block = [](std::vector<std::uint8_t>& plane, int stride, int ax, int ay,
                         int bx, int by, int size) {
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c)
                std::swap(plane[static_cast<std::size_t>(ay + r) * stride + ax + c],
                          plane[static_cast<std::size_t>(by + r) * stride + bx + c]);
    };
    for (std::uint64_t seed : {42ull, 43ull, 44ull}) {
        auto p = testutil::synthetic_patch(seed, 32, 32);
        auto q = p;
        // swap two 8x8 luma DCT blocks and two 8x8 chroma DCT blocks
        swap_block(q.y, 32, 0, 0, 16, 24, 8);
        swap_block(q.cb, 16, 0, 0, 8, 8, 8);
        swap_block(q.cr, 16, 0, 0, 8, 8, 8);
        for (int qp : canonical_qp_grid) REQUIRE(rate_score(q, qp) == rate_score(p, qp));
    }
}

TEST_CASE("calibrate recovers an exact affine relation") {
    std::vector<RateMeasurement> ms;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(0.05, 0.9);
    for (int patch = 0; patch < 20; ++patch) {
        double base = d(rng);
        for (std::size_t i = 0; i < canonical_qp_grid.size(); ++i) {
            // proxy strictly decreasing in qp within each patch
            double proxy = base * (1.0 - 0.2 * static_cast<double>(i));
            RateMeasurement m;
            m.patch_id = "p" + std::to_string(patch);
            m.qp = canonical_qp_grid[i];
            m.proxy_raw = proxy;
            m.real_bpp = 7.677 * proxy - 0.282 + 10.0;  // keep bpp positive
            ms.push_back(m);
        }
    }
    auto fit = calibrate(ms);
    CHECK(fit.slope == Catch::Approx(7.677).margin(1e-10));
    CHECK(fit.intercept == Catch::Approx(10.0 - 0.282).margin(1e-9));
    CHECK(fit.report.mae == Catch::Approx(0.0).margin(1e-10));
    CHECK(fit.report.spearman_rho == Catch::Approx(1.0).margin(1e-12));
    CHECK(fit.report.pearson_r == Catch::Approx(1.0).margin(1e-12));
    CHECK(fit.monotone_fraction == 1.0);
    CHECK(fit.patches_total == 20);
    CHECK(fit.patches_excluded == 0);
    REQUIRE(fit.per_qp_rho.size() == 4);
    for (const auto& [qp, rho] : fit.per_qp_rho) CHECK(rho == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("calibrate spearman matches the stats oracle under rank perturbation") {
    // two QPs, proxy ordering across patches permuted vs bpp ordering
    std::vector<double> proxy{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    std::vector<double> bpp{0.5, 0.3, 0.9, 0.8, 1.5, 1.2};
    std::vector<RateMeasurement> ms;
    for (int i = 0; i < 6; ++i) {
        RateMeasurement m;
        m.patch_id = "p" + std::to_string(i % 3);
        m.qp = i < 3 ? 22 : 37;
        m.proxy_raw = proxy[i];
        m.real_bpp = bpp[i];
        ms.push_back(m);
    }
    auto fit = calibrate(ms);
    CHECK(fit.report.spearman_rho ==
          Catch::Approx(stats::spearman(proxy, bpp)).margin(1e-14));
}

TEST_CASE("calibrate pooled spearman is invariant to monotone reparameterization") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> d(0.01, 2.0);
    std::vector<RateMeasurement> ms;
    for (int patch = 0; patch < 15; ++patch)
        for (int qp : {22, 27, 32, 37}) {
            RateMeasurement m;
            m.patch_id = "p" + std::to_string(patch);
            m.qp = qp;
            m.proxy_raw = d(rng);
            m.real_bpp = d(rng);
            ms.push_back(m);
        }
    auto base = calibrate(ms);
    auto warped = ms;
    for (auto& m : warped) m.proxy_raw = std::log1p(m.proxy_raw);
    auto after = calibrate(warped);
    CHECK(after.report.spearman_rho ==
          Catch::Approx(base.report.spearman_rho).margin(1e-12));
}

TEST_CASE("calibrate excludes and counts single-QP patches") {
    std::vector<RateMeasurement> ms;
    for (int patch = 0; patch < 3; ++patch)
        for (int qp : {22, 37}) {
            RateMeasurement m;
            m.patch_id = "p" + std::to_string(patch);
            m.qp = qp;
            m.proxy_raw = 0.5 - 0.01 * qp + 0.1 * patch;
            m.real_bpp = 1.0 - 0.02 * qp + 0.2 * patch;
            ms.push_back(m);
        }
    RateMeasurement lone;
    lone.patch_id = "lonely";
    lone.qp = 27;
    lone.proxy_raw = 0.4;
    lone.real_bpp = 0.9;
    ms.push_back(lone);
    auto fit = calibrate(ms);
    CHECK(fit.patches_total == 4);
    CHECK(fit.patches_excluded == 1);
    CHECK(fit.monotone_fraction == 1.0);  // the 3 full patches are monotone
}

TEST_CASE("calibrate precondition failures") {
    std::vector<RateMeasurement> ms;
    RateMeasurement m;
    m.patch_id = "only";
    m.qp = 22;
    m.proxy_raw = 0.5;
    m.real_bpp = 1.0;
    ms.push_back(m);
    CHECK_THROWS_AS(calibrate(ms), invalid_input_error);

    m.real_bpp = -1.0;
    CHECK_THROWS_AS(calibrate({m}), invalid_input_error);
}

TEST_CASE("measurement and fit CSV emission") {
    std::vector<RateMeasurement> ms;
    for (int patch = 0; patch < 2; ++patch)
        for (int qp : {22, 37}) {
            RateMeasurement m;
            m.patch_id = "p" + std::to_string(patch);
            m.qp = qp;
            m.proxy_raw = 0.75 - 0.01 * qp + 0.3 * patch;
            m.real_bpp = 2.0 - 0.03 * qp + 0.5 * patch;
            ms.push_back(m);
        }
    std::ostringstream mcsv;
    write_measurements_csv(mcsv, ms);
    std::string mtext = mcsv.str();
    CHECK(mtext.starts_with("patch_id,qp,proxy_raw,real_bpp\n"));
    CHECK(std::count(mtext.begin(), mtext.end(), '\n') == 5);

    auto fit = calibrate(ms);
    std::ostringstream fcsv;
    write_fit_csv(fcsv, fit);
    CHECK(fcsv.str().find("slope,intercept,spearman,pearson,mae,per_qp_rho_22,per_qp_rho_37,"
                          "monotone_fraction") != std::string::npos);
}
