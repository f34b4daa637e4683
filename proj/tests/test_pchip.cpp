#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "rdbench/pchip.hpp"

using namespace rdbench;
using rdbench::bd::pchip_fit;

TEST_CASE("pchip reproduces linear data exactly") {
    std::vector<double> xs{0.0, 1.0, 2.5, 4.0}, ys{1.0, 2.0, 3.5, 5.0};  // y = x + 1
    auto f = pchip_fit(xs, ys);
    for (double x = 0.0; x <= 4.0; x += 0.01)
        REQUIRE(f(x) == Catch::Approx(x + 1.0).margin(1e-12));
}

TEST_CASE("pchip interpolates every knot exactly") {
    std::vector<double> xs{30.0, 35.5, 41.25, 44.0}, ys{2.1, 2.9, 3.55, 4.4};
    auto f = pchip_fit(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(f(xs[i]) == ys[i]);
}

// Reference values computed with an independent shape-preserving Hermite
// implementation on the same knot set; frozen here to pin the derivative rule.
TEST_CASE("pchip matches frozen reference evaluations") {
    std::vector<double> xs{30.0, 35.5, 41.25, 44.0}, ys{2.1, 2.9, 3.55, 4.4};
    auto f = pchip_fit(xs, ys);
    CHECK(f(31.7) == Catch::Approx(2.3667093459635695).margin(1e-12));
    CHECK(f(36.2) == Catch::Approx(2.9822018990299792).margin(1e-12));
    CHECK(f(40.0) == Catch::Approx(3.364216666268241).margin(1e-12));
    CHECK(f(43.9) == Catch::Approx(4.362731614729909).margin(1e-12));
    CHECK(f.derivs[0] == Catch::Approx(0.16129995608256473).margin(1e-12));
    CHECK(f.derivs[1] == Catch::Approx(0.12733538908035552).margin(1e-12));
    CHECK(f.derivs[2] == Catch::Approx(0.17511069680727104).margin(1e-12));
    CHECK(f.derivs[3] == Catch::Approx(0.3725180190653339).margin(1e-12));

    // data with a flat start and an interior extremum
    std::vector<double> xs2{0.0, 1.0, 2.0, 3.0, 4.5}, ys2{1.0, 1.0, 3.0, 2.0, 2.5};
    auto g = pchip_fit(xs2, ys2);
    CHECK(g(0.5) == Catch::Approx(1.0).margin(1e-12));
    CHECK(g(1.5) == Catch::Approx(2.0).margin(1e-12));
    CHECK(g(2.5) == Catch::Approx(2.5).margin(1e-12));
    CHECK(g(3.2) == Catch::Approx(2.0011851851851854).margin(1e-12));
    CHECK(g(4.0) == Catch::Approx(2.1481481481481484).margin(1e-12));

    // two knots degenerate to the chord
    auto h = pchip_fit(std::vector{1.0, 3.0}, std::vector{2.0, 8.0});
    CHECK(h(2.2) == Catch::Approx(5.6).margin(1e-12));
}

TEST_CASE("pchip is monotone on monotone knots (dense scan)") {
    std::vector<double> xs{1.0, 2.0, 3.0, 4.0}, ys{1.0, 4.0, 9.0, 16.0};
    auto f = pchip_fit(xs, ys);
    double prev = f(1.0);
    for (int i = 1; i <= 1000; ++i) {
        double x = 1.0 + 3.0 * i / 1000.0;
        double v = f(x);
        REQUIRE(v >= prev);
        prev = v;
    }
}

TEST_CASE("pchip never overshoots the knot range on monotone data") {
    std::vector<double> xs{0.0, 0.7, 1.1, 3.0, 3.2}, ys{5.0, 4.0, 3.9, 1.0, 0.5};
    auto f = pchip_fit(xs, ys);
    for (int i = 0; i <= 5000; ++i) {
        double x = 0.0 + 3.2 * i / 5000.0;
        double v = f(x);
        REQUIRE(v <= 5.0 + 1e-12);
        REQUIRE(v >= 0.5 - 1e-12);
    }
}

TEST_CASE("pchip input validation") {
    CHECK_THROWS_AS(pchip_fit(std::vector{1.0}, std::vector{1.0}), invalid_input_error);
    CHECK_THROWS_AS(pchip_fit(std::vector{1.0, 1.0, 2.0}, std::vector{1.0, 2.0, 3.0}),
                    invalid_input_error);
    CHECK_THROWS_AS(pchip_fit(std::vector{2.0, 1.0}, std::vector{1.0, 2.0}),
                    invalid_input_error);
    CHECK_THROWS_AS(pchip_fit(std::vector{1.0, 2.0}, std::vector{1.0}), invalid_input_error);
}
