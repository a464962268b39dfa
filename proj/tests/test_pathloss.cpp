#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "blockcov/numerics.hpp"
#include "blockcov/pathloss.hpp"
#include "doctest.h"

using namespace blockcov;

namespace {

// Reference pair: C_L = 1e-6 W at 1 m (1 W transmit power folded in),
// alpha_L = 2.2, C_N = 1e-7, alpha_N = 3.6.
PathLossSpec paper_bplp() { return PathLossSpec::bplp(1e-6, 2.2, 1e-7, 3.6); }

// Root-finding oracle for the exclusion radii, independent of the closed
// forms: first y with ell(target, y) <= threshold.
double exclusion_oracle(const PathLossSpec& s, LinkState target, double threshold) {
    if (ell(s, target, 0.0) <= threshold) return 0.0;
    double hi = 1.0;
    while (ell(s, target, hi) > threshold && hi < 1e9) hi *= 2.0;
    return num::find_first_true([&](double y) { return ell(s, target, y) <= threshold; }, 0.0,
                                hi, 1e-7);
}

}  // namespace

TEST_CASE("ell: BPLP and LAP anchors") {
    const PathLossSpec s = paper_bplp();
    CHECK(ell(s, LinkState::Los, 0.5) == doctest::Approx(1e-6));
    CHECK(ell(s, LinkState::Los, 10.0) == doctest::Approx(1e-6 * std::pow(10.0, -2.2)));
    CHECK(ell(s, LinkState::Nlos, 10.0) == doctest::Approx(1e-7 * std::pow(10.0, -3.6)));
    const PathLossSpec lap = PathLossSpec::lap(1e-6, 2.2);
    CHECK(ell(lap, LinkState::Nlos, 37.0) == 0.0);
    CHECK(ell(lap, LinkState::Los, 2.0) == doctest::Approx(1e-6 * std::pow(2.0, -2.2)));
}

TEST_CASE("derived constants match the gain/exponent ratios") {
    const PathLossSpec s = paper_bplp();
    CHECK(s.alpha_ratio == doctest::Approx(2.2 / 3.6).epsilon(1e-12));
    CHECK(s.c_ratio == doctest::Approx(std::pow(0.1, 1.0 / 3.6)).epsilon(1e-12));
    CHECK(s.c_ratio == doctest::Approx(0.52748).epsilon(1e-4));
}

TEST_CASE("excl_e1: closed form vs root-find oracle") {
    const PathLossSpec s = paper_bplp();
    const double near_edge = std::pow(s.c_ratio, -1.0 / s.alpha_ratio);
    CHECK(near_edge == doctest::Approx(2.848).epsilon(1e-3));
    CHECK(excl_e1(s, 2.0) == 0.0);
    CHECK(excl_e1(s, 10.0) == doctest::Approx(2.154).epsilon(1e-3));
    for (double x : {3.0, 10.0, 50.0, 200.0}) {
        const double oracle = exclusion_oracle(s, LinkState::Nlos, ell(s, LinkState::Los, x));
        CHECK(excl_e1(s, x) == doctest::Approx(oracle).epsilon(1e-6));
    }
    CHECK(excl_e1(PathLossSpec::lap(1e-6, 2.2), 50.0) == 0.0);
}

TEST_CASE("excl_e2: closed form vs root-find oracle") {
    const PathLossSpec s = paper_bplp();
    CHECK(excl_e2(s, 0.5) == doctest::Approx(2.848).epsilon(1e-3));
    CHECK(excl_e2(s, 10.0) == doctest::Approx(123.3).epsilon(1e-3));
    for (double x : {0.5, 10.0, 50.0}) {
        const double oracle = exclusion_oracle(s, LinkState::Los, ell(s, LinkState::Nlos, x));
        CHECK(excl_e2(s, x) == doctest::Approx(oracle).epsilon(1e-4));
    }
    CHECK(std::isinf(excl_e2(PathLossSpec::lap(1e-6, 2.2), 3.0)));
}

TEST_CASE("exclusion radii: tight minimality and ordering") {
    const PathLossSpec s = paper_bplp();
    for (double x = 4.0; x <= 200.0; x *= 1.7) {
        const double e1 = excl_e1(s, x);
        CHECK(e1 < x);
        if (e1 > 0) {
            CHECK(ell(s, LinkState::Nlos, e1) <= ell(s, LinkState::Los, x) * (1 + 1e-9));
            CHECK(ell(s, LinkState::Nlos, e1 * (1 - 1e-6)) >=
                  ell(s, LinkState::Los, x) * (1 - 1e-9));
        }
        const double e2 = excl_e2(s, x);
        CHECK(e2 > x);
        CHECK(excl_e1(s, x * 1.5) >= e1);
        CHECK(excl_e2(s, x * 1.5) >= e2);
    }
}

TEST_CASE("custom spec: validation and generic exclusion radii") {
    auto f_los = [](double x) { return 2e-6 / (1.0 + x * x * x); };
    auto f_nlos = [](double x) { return 1e-7 / (1.0 + x * x * x * x); };
    const PathLossSpec s = PathLossSpec::custom(f_los, f_nlos, 1e3);
    for (double x : {2.0, 9.0, 40.0}) {
        const double e1 = excl_e1(s, x);
        const double oracle1 = exclusion_oracle(s, LinkState::Nlos, f_los(x));
        CHECK(e1 == doctest::Approx(oracle1).epsilon(1e-4));
        CHECK(e1 < x);
        const double e2 = excl_e2(s, x);
        const double oracle2 = exclusion_oracle(s, LinkState::Los, f_nlos(x));
        CHECK(e2 == doctest::Approx(oracle2).epsilon(1e-4));
        CHECK(e2 > x);
    }
    // NLoS above LoS is rejected.
    CHECK_THROWS_AS(PathLossSpec::custom(f_nlos, f_los, 1e3), std::invalid_argument);
    // Increasing path-loss is rejected.
    CHECK_THROWS_AS(PathLossSpec::custom([](double x) { return 1e-6 * (1.0 + x); },
                                         [](double) { return 1e-9; }, 1e3),
                    std::invalid_argument);
}
