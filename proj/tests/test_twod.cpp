#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "blockcov/numerics.hpp"
#include "blockcov/sim.hpp"
#include "blockcov/twod.hpp"
#include "doctest.h"

using namespace blockcov;
using namespace blockcov::twod;

namespace {

constexpr double kPi = M_PI;

// Reference 2D setup: lambda = 30 BS/km^2, mu = 220/km^2, L ~ Uniform(0, 200 m)
// so beta = 0.014/m, BPLP 2.2/3.6 with gains 1e-6/1e-7, -174 dBm/Hz, 1 GHz.
NetworkParams2D reference_2d() {
    NetworkParams2D p;
    p.lambda = 30e-6;
    p.blockage.mu = 220e-6;
    p.blockage.length = LengthDist::uniform(200.0);
    p.pathloss = PathLossSpec::bplp(1e-6, 2.2, 1e-7, 3.6);
    p.noise_power = std::pow(10.0, (-174.0 - 30.0) / 10.0) * 1e9;
    p.bandwidth = 1e9;
    p.user_density = 200e-6;
    return p;
}

NetworkParams2D reference_lap() {
    NetworkParams2D p = reference_2d();
    p.pathloss = PathLossSpec::lap(1e-6, 2.2);
    return p;
}

// Engine-independent evaluation of g_s(x) straight from the displayed
// double integrals over the joint link-state probabilities.
double g_2d_direct(const NetworkParams2D& p, LinkState s, double x) {
    num::QuadSpec spec;
    spec.rel_tol = 1e-7;
    spec.abs_tol = 1e-11;
    const double beta = p.beta();
    const auto theta_int = [&](LinkState s2, double t) {
        return 2.0 * num::integrate(
                         [&](double th) {
                             return joint_prob(p.blockage, s, s2, x, t, th);
                         },
                         0.0, kPi, spec);
    };
    const double p_s = s == LinkState::Los ? std::exp(-beta * x) : -std::expm1(-beta * x);
    if (!(p_s > 0)) return s == LinkState::Los ? 1.0 : 0.0;
    double expo = 0.0;
    const double hi_los = s == LinkState::Los
                              ? x
                              : std::min(excl_e2(p.pathloss, x), x + 46.0 / beta);
    expo += num::integrate(
        [&](double t) { return theta_int(LinkState::Los, t) * t; }, 0.0, hi_los, spec);
    const double hi_nlos = s == LinkState::Los ? excl_e1(p.pathloss, x) : x;
    if (hi_nlos > 0)
        expo += num::integrate(
            [&](double t) { return theta_int(LinkState::Nlos, t) * t; }, 0.0, hi_nlos, spec);
    return p_s * std::exp(-p.lambda * expo / p_s);
}

}  // namespace

TEST_CASE("g_2d: anchors") {
    const NetworkParams2D p = reference_2d();
    CHECK(g_2d(p, LinkState::Los, 0.0) == doctest::Approx(1.0));
    CHECK(g_2d(p, LinkState::Nlos, 0.0) == doctest::Approx(0.0));
    CHECK(g_2d(reference_lap(), LinkState::Nlos, 80.0) == 0.0);
    const double g50 = g_2d(p, LinkState::Los, 50.0);
    CHECK(g50 > 0.0);
    CHECK(g50 < 1.0);
}

TEST_CASE("g_2d: engine matches the direct double-integral evaluation") {
    const NetworkParams2D p = reference_2d();
    for (double x : {30.0, 80.0}) {
        CHECK(g_2d(p, LinkState::Los, x) ==
              doctest::Approx(g_2d_direct(p, LinkState::Los, x)).epsilon(2e-4));
    }
    CHECK(g_2d(p, LinkState::Nlos, 60.0) ==
          doctest::Approx(g_2d_direct(p, LinkState::Nlos, 60.0)).epsilon(2e-4));
}

TEST_CASE("g_2d: independent mode equals the closed independent form") {
    const NetworkParams2D p = reference_2d();
    const double beta = p.beta();
    for (double x : {10.0, 50.0, 120.0}) {
        const double e1 = excl_e1(p.pathloss, x);
        const auto f1 = [&](double z) { return (1.0 + beta * z) * std::exp(-beta * z); };
        const double closed =
            std::exp(-beta * x - p.lambda * kPi * e1 * e1 -
                     2.0 * kPi * p.lambda / (beta * beta) * (f1(e1) - f1(x)));
        CHECK(g_2d(p, LinkState::Los, x, Correlation::Independent) ==
              doctest::Approx(closed).epsilon(1e-6));
    }
}

TEST_CASE("g_2d: vanishing blockage length reproduces the independent path") {
    NetworkParams2D p = reference_2d();
    const double beta = p.beta();
    p.blockage.length = LengthDist::uniform(1e-4);
    p.blockage.mu = kPi * beta / 1e-4;
    CHECK(p.beta() == doctest::Approx(beta).epsilon(1e-12));
    for (double x : {20.0, 70.0}) {
        CHECK(g_2d(p, LinkState::Los, x) ==
              doctest::Approx(g_2d(p, LinkState::Los, x, Correlation::Independent))
                  .epsilon(1e-7));
    }
}

TEST_CASE("g_2d_bounds: closed Bessel form equals the sin^2 integral form") {
    const NetworkParams2D p = reference_2d();
    const double beta = p.beta();
    num::QuadSpec spec;
    spec.rel_tol = 1e-10;
    spec.abs_tol = 1e-14;
    for (double x : {10.0, 50.0, 100.0}) {
        const double e1 = excl_e1(p.pathloss, x);
        const double inner = num::integrate(
            [&](double t) {
                return 4.0 * p.lambda * t *
                       num::integrate(
                           [&](double th) {
                               const double s = std::sin(th);
                               return std::exp(-beta * t * s * s);
                           },
                           0.0, kPi / 2, spec);
            },
            e1, x, spec);
        const double integral_form =
            std::exp(-beta * x - p.lambda * kPi * e1 * e1 - inner);
        CHECK(g_2d_bounds(p, LinkState::Los, x).lower ==
              doctest::Approx(integral_form).epsilon(1e-6));
    }
}

TEST_CASE("g_2d_bounds: sandwich for both serving types") {
    const NetworkParams2D p = reference_2d();
    CHECK(g_2d_bounds(p, LinkState::Los, 0.0).lower == doctest::Approx(1.0));
    CHECK(g_2d_bounds(p, LinkState::Los, 0.0).upper == doctest::Approx(1.0));
    for (double x : {5.0, 20.0, 50.0, 100.0, 200.0}) {
        const BoundPair bl = g_2d_bounds(p, LinkState::Los, x);
        const double gl = g_2d(p, LinkState::Los, x);
        CHECK(bl.lower <= gl * (1 + 1e-6) + 1e-12);
        CHECK(gl <= bl.upper * (1 + 1e-6) + 1e-12);
        const BoundPair bn = g_2d_bounds(p, LinkState::Nlos, x);
        const double gn = g_2d(p, LinkState::Nlos, x);
        CHECK(bn.lower <= bn.upper);
        CHECK(bn.lower <= gn * (1 + 1e-6) + 1e-12);
        CHECK(gn <= bn.upper * (1 + 1e-6) + 1e-12);
    }
}

TEST_CASE("big_g_2d and association") {
    const NetworkParams2D p = reference_2d();
    CHECK(big_g_2d(p, LinkState::Los, 5000.0) == doctest::Approx(0.0).epsilon(1e-9));
    // The first-order correlation approximation under-counts each branch's
    // void probability by up to a few percent, so the branches sum short of
    // one; the simulator carries the exact total.
    const double total =
        assoc_prob_2d(p, LinkState::Los) + assoc_prob_2d(p, LinkState::Nlos);
    CHECK(total == doctest::Approx(1.0).epsilon(0.07));
    CHECK(total <= 1.0 + 5e-3);
    NetworkParams2D thin = reference_2d();
    thin.blockage.mu = 1e-12;
    CHECK(assoc_prob_2d(thin, LinkState::Los) == doctest::Approx(1.0).epsilon(1e-4));
    // The reference parameters sit between the closed-form association bounds.
    const BoundPair ab = assoc_bounds_2d(p);
    const double a_l = assoc_prob_2d(p, LinkState::Los);
    CHECK(ab.lower <= a_l);
    CHECK(a_l <= ab.upper);
    CHECK(ab.upper == doctest::Approx(0.6177).epsilon(1e-3));
    // Independence upper-bounds the correlated association.
    CHECK(assoc_prob_2d(p, LinkState::Los, Correlation::Independent) + 1e-9 >= a_l);
    // Under the zero-NLoS law the independent pipeline integrates to the
    // closed association bound exactly.
    const NetworkParams2D lap = reference_lap();
    CHECK(assoc_prob_2d(lap, LinkState::Los, Correlation::Independent) ==
          doctest::Approx(assoc_bounds_2d(lap).upper).epsilon(1e-6));
}

TEST_CASE("assoc is non-increasing in blockage length at fixed beta") {
    const NetworkParams2D base = reference_2d();
    const double beta = base.beta();
    double prev = 2.0;
    for (double l_max : {20.0, 200.0, 1000.0}) {
        NetworkParams2D p = base;
        p.blockage.length = LengthDist::uniform(l_max);
        p.blockage.mu = kPi * beta / l_max;
        const double a = assoc_prob_2d(p, LinkState::Los);
        CHECK(a <= prev + 1e-6);
        prev = a;
    }
}

TEST_CASE("serving_pdf_2d: normalization and degenerate conditioning") {
    const NetworkParams2D p = reference_2d();
    num::QuadSpec spec;
    spec.rel_tol = 1e-6;
    spec.abs_tol = 1e-9;
    for (LinkState s : {LinkState::Los, LinkState::Nlos}) {
        const double mass = num::integrate(
            [&](double x) { return serving_pdf_2d(p, s, x); }, 0.0, 46.0 / p.beta(), spec);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
    }
    CHECK_THROWS_AS(serving_pdf_2d(reference_lap(), LinkState::Nlos, 50.0), DegenerateCondition);
}

TEST_CASE("lt_interference_2d: trivial values and correlation ordering") {
    const NetworkParams2D p = reference_2d();
    CHECK(lt_interference_2d(p, LinkState::Los, LinkState::Los, 50.0, 0.0) == 1.0);
    const NetworkParams2D lap = reference_lap();
    CHECK(lt_interference_2d(lap, LinkState::Nlos, LinkState::Los, 50.0, 1e9) == 1.0);
    // Under LoS association, correlation makes LoS interference statistically
    // larger: the conditional LT drops below its independent counterpart.
    const double nu = 1.0 / ell(lap.pathloss, LinkState::Los, 50.0);
    const double corr = lt_interference_2d(lap, LinkState::Los, LinkState::Los, 50.0, nu);
    const double ind = lt_interference_2d(lap, LinkState::Los, LinkState::Los, 50.0, nu,
                                          Correlation::Independent);
    CHECK(corr <= ind + 1e-9);
    CHECK(corr > 0.0);
    CHECK(corr <= 1.0);
}

TEST_CASE("serving_pdf_2d: mode lands in the MC histogram's peak bin") {
    const NetworkParams2D p = reference_2d();
    sim::SimConfig cfg;
    cfg.dimension = 2;
    cfg.params2 = p;
    cfg.n_scenes = 8000;
    cfg.rng_seed = 43;
    cfg.window_radius = 1900.0;
    cfg.guard_radius = 200.0;
    constexpr double kBin = 20.0;
    constexpr int kBins = 20;
    double hist[kBins] = {0};
    for (int i = 0; i < cfg.n_scenes; ++i) {
        sim::SimScene scene = sim::generate_scene(cfg, i);
        const auto out = sim::resolve_sinr(scene, cfg);
        if (!out || out->serving_state != LinkState::Los) continue;
        const int b = static_cast<int>(out->serving_distance / kBin);
        if (b < kBins) hist[b] += 1.0;
    }
    const int peak = static_cast<int>(std::max_element(hist, hist + kBins) - hist);
    double best_x = 0.0, best_f = -1.0;
    for (double x = 1.0; x <= kBins * kBin; x += 1.0) {
        const double f = serving_pdf_2d(p, LinkState::Los, x);
        if (f > best_f) {
            best_f = f;
            best_x = x;
        }
    }
    // Allow one neighboring bin of slack for MC noise.
    CHECK(std::fabs(best_x - (peak + 0.5) * kBin) <= 1.5 * kBin);
}

TEST_CASE("lt_interference_2d: conditioned simulator oracle") {
    const NetworkParams2D p = reference_2d();
    sim::SimConfig cfg;
    cfg.dimension = 2;
    cfg.params2 = p;
    cfg.n_scenes = 25000;
    cfg.rng_seed = 17;
    cfg.window_radius = 1900.0;
    cfg.guard_radius = 200.0;
    const double nu = 1.0 / ell(p.pathloss, LinkState::Los, 50.0);
    const auto est = sim::estimate_conditioned_lt(cfg, LinkState::Los, 45.0, 55.0,
                                                  LinkState::Los, nu);
    // Analytic LT at the bin midpoint; allow for the finite bin width by
    // adding the endpoint spread.
    const double at_mid = lt_interference_2d(p, LinkState::Los, LinkState::Los, 50.0, nu);
    const double tol =
        3.0 * est.std_error +
        std::fabs(lt_interference_2d(p, LinkState::Los, LinkState::Los, 45.0, nu) -
                  lt_interference_2d(p, LinkState::Los, LinkState::Los, 55.0, nu));
    CHECK(std::fabs(at_mid - est.mean) <= tol);
}

TEST_CASE("coverage_2d: limits, monotonicity, independence ordering") {
    const NetworkParams2D p = reference_2d();
    const double assoc_total =
        assoc_prob_2d(p, LinkState::Los) + assoc_prob_2d(p, LinkState::Nlos);
    CHECK(coverage_2d(p, 0.0) == doctest::Approx(assoc_total).epsilon(1e-9));
    CHECK(coverage_2d(p, 0.0) == doctest::Approx(1.0).epsilon(0.07));
    const NetworkParams2D lap = reference_lap();
    CHECK(coverage_2d(lap, 1e-12) ==
          doctest::Approx(assoc_prob_2d(lap, LinkState::Los)).epsilon(1e-3));
    double prev = 2.0;
    for (double db : {-10.0, 0.0, 10.0, 20.0}) {
        const double tau = std::pow(10.0, db / 10.0);
        const double c = coverage_2d(p, tau);
        CHECK(c <= prev + 1e-6);
        CHECK(c >= 0.0);
        prev = c;
        if (db <= 10.0) {
            const double iba = coverage_2d(p, tau, Correlation::Independent);
            CHECK(c <= iba + 5e-3);
        }
    }
}

TEST_CASE("coverage_2d_bounds: bracket for the zero-NLoS law") {
    const NetworkParams2D lap = reference_lap();
    CHECK_THROWS_AS(coverage_2d_bounds(reference_2d(), 1.0), std::invalid_argument);
    for (double db : {-10.0, 0.0, 10.0, 20.0}) {
        const double tau = std::pow(10.0, db / 10.0);
        const BoundPair b = coverage_2d_bounds(lap, tau);
        const double c = coverage_2d(lap, tau);
        CHECK(b.lower <= c + 5e-3);
        CHECK(c <= b.upper + 5e-3);
        CHECK(b.lower <= b.upper);
    }
}

TEST_CASE("g_lap_simple_bounds: brackets the maximally correlated form") {
    const NetworkParams2D lap = reference_lap();
    const BoundPair b0 = g_lap_simple_bounds(lap, 0.0);
    CHECK(b0.lower == doctest::Approx(1.0));
    CHECK(b0.upper == doctest::Approx(1.0));
    for (double r = 5.0; r <= 200.0; r += 15.0) {
        const BoundPair b = g_lap_simple_bounds(lap, r);
        const double under = g_2d_bounds(lap, LinkState::Los, r).lower;
        CHECK(b.lower <= under * (1 + 1e-9) + 1e-15);
        CHECK(under <= b.upper * (1 + 1e-9) + 1e-15);
    }
}

TEST_CASE("rate_coverage_2d: boundary allocations") {
    const NetworkParams2D p = reference_2d();
    RateAllocation equal{RateAllocation::Mode::EqualAll};
    RateAllocation los_only{RateAllocation::Mode::LosOnly};
    CHECK(rate_coverage_2d(p, equal, 0.0) == doctest::Approx(1.0).epsilon(0.07));
    CHECK(rate_coverage_2d(p, los_only, 0.0) ==
          doctest::Approx(assoc_prob_2d(p, LinkState::Los)).epsilon(1e-3));
    // Wide bandwidth pushes the threshold to zero.
    NetworkParams2D wide = p;
    wide.bandwidth = 1e15;
    CHECK(rate_coverage_2d(wide, equal, 5e7) == doctest::Approx(1.0).epsilon(0.07));
    CHECK(equal.mean_users(p, 1.0) == doctest::Approx(1.0 + 1.28 * 200.0 / 30.0));
    // Rate coverage decreases with the target rate.
    const double r1 = rate_coverage_2d(p, equal, 2e7);
    const double r2 = rate_coverage_2d(p, equal, 8e7);
    CHECK(r2 <= r1 + 1e-9);
    // Zero-NLoS law: the LoS-only rate coverage is the plain coverage at the
    // LoS-share threshold.
    const NetworkParams2D lap = reference_lap();
    const double a_l = assoc_prob_2d(lap, LinkState::Los);
    const double n_lu = los_only.mean_users(lap, a_l);
    const double tau = std::exp2(5e7 * n_lu / lap.bandwidth) - 1.0;
    CHECK(rate_coverage_2d(lap, los_only, 5e7) ==
          doctest::Approx(coverage_2d(lap, tau)).epsilon(1e-6));
}
