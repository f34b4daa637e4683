#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rdbench/dct.hpp"

using rdbench::proxy::Block8;
using rdbench::proxy::dct8x8;
using rdbench::proxy::idct8x8;

namespace {

// Naive O(n^4) double-sum orthonormal DCT-II oracle.
Block8 dct_oracle(const Block8& x) {
    const double pi = std::acos(-1.0);
    Block8 out{};
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double au = u == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
            double av = v == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
            double s = 0.0;
            for (int m = 0; m < 8; ++m)
                for (int n = 0; n < 8; ++n)
                    s += x[m * 8 + n] * std::cos((2 * m + 1) * u * pi / 16.0) *
                         std::cos((2 * n + 1) * v * pi / 16.0);
            out[u * 8 + v] = au * av * s;
        }
    return out;
}

}  // namespace

TEST_CASE("dct of the zero block is zero") {
    Block8 zero{};
    auto c = dct8x8(zero);
    for (double v : c) REQUIRE(v == 0.0);
}

TEST_CASE("dct of a constant block concentrates in DC with orthonormal scaling") {
    for (double val : {1.0, -37.5, 100.0}) {
        Block8 b{};
        b.fill(val);
        auto c = dct8x8(b);
        CHECK(c[0] == Catch::Approx(8.0 * val).margin(1e-10));
        for (int i = 1; i < 64; ++i) REQUIRE(std::abs(c[i]) < 1e-10);
    }
}

TEST_CASE("dct matches the naive double-sum oracle on random blocks") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-128.0, 127.0);
    for (int rep = 0; rep < 50; ++rep) {
        Block8 b{};
        for (auto& v : b) v = d(rng);
        auto fast = dct8x8(b);
        auto slow = dct_oracle(b);
        for (int i = 0; i < 64; ++i) REQUIRE(fast[i] == Catch::Approx(slow[i]).margin(1e-10));
    }
}

TEST_CASE("dct round-trips through its inverse") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> d(-128.0, 127.0);
    for (int rep = 0; rep < 50; ++rep) {
        Block8 b{};
        for (auto& v : b) v = d(rng);
        auto back = idct8x8(dct8x8(b));
        for (int i = 0; i < 64; ++i) REQUIRE(back[i] == Catch::Approx(b[i]).margin(1e-9));
    }
}
