#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "blockcov/numerics.hpp"
#include "blockcov/oned.hpp"
#include "doctest.h"

using namespace blockcov;
using namespace blockcov::oned;

namespace {

// Reference 1D setup: lambda = 10 BS/km, mu = 0.007/m, BPLP with alpha 2.2/3.6,
// gains 1e-6/1e-7 W at 1 m, noise -174 dBm/Hz over 1 GHz.
NetworkParams1D reference_1d() {
    NetworkParams1D p;
    p.lambda = 0.01;
    p.mu = 0.007;
    p.pathloss = PathLossSpec::bplp(1e-6, 2.2, 1e-7, 3.6);
    p.noise_power = std::pow(10.0, (-174.0 - 30.0) / 10.0) * 1e9;
    p.bandwidth = 1e9;
    return p;
}

NetworkParams1D lap_1d(double lambda, double mu) {
    NetworkParams1D p;
    p.lambda = lambda;
    p.mu = mu;
    p.pathloss = PathLossSpec::lap(1e-6, 2.2);
    p.noise_power = 3.9811e-12;
    return p;
}

// Nested quadrature of E_{q,q'}[g_cond], split at the conditional density's
// breakpoints so the adaptive rule sees smooth pieces only.
double expectation_of_cond(const NetworkParams1D& p, LinkState s, double x) {
    num::QuadSpec spec;
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-16;
    spec.tail_cutoff_exponent = 40.0;
    const double e1 = excl_e1(p.pathloss, x);
    const double e2 = excl_e2(p.pathloss, x);
    const auto inner = [&](double q) {
        const auto f = [&](double qp) {
            return p.mu * std::exp(-p.mu * qp) * g_cond_1d(p, s, x, q, qp);
        };
        double total = 0.0;
        double lo = 0.0;
        for (double b : {std::min(e1, x), x, std::isfinite(e2) ? e2 : x}) {
            if (b > lo) {
                total += num::integrate(f, lo, b, spec);
                lo = b;
            }
        }
        total += num::integrate_exp_tail(f, lo, p.mu, spec);
        return p.mu * std::exp(-p.mu * q) * total;
    };
    if (s == LinkState::Los) return num::integrate_exp_tail(inner, x, p.mu, spec);
    return x > 0 ? num::integrate(inner, 0.0, x, spec) : 0.0;
}

}  // namespace

TEST_CASE("g_cond_1d: branch structure") {
    const NetworkParams1D p = reference_1d();
    const double lam = p.lambda;
    CHECK(g_cond_1d(p, LinkState::Los, 60.0, 50.0, 10.0) == 0.0);  // x >= q
    // Third branch: q' beyond x.
    CHECK(g_cond_1d(p, LinkState::Los, 20.0, 50.0, 30.0) ==
          doctest::Approx(std::exp(-2.0 * lam * 20.0)).epsilon(1e-12));
    // Middle branch: e1(x) <= q' < x.
    const double e1 = excl_e1(p.pathloss, 50.0);
    CHECK(g_cond_1d(p, LinkState::Los, 50.0, 80.0, 30.0) ==
          doctest::Approx(std::exp(-lam * 50.0) * std::exp(-lam * 30.0)).epsilon(1e-12));
    CHECK(g_cond_1d(p, LinkState::Los, 50.0, 80.0, 0.5 * e1) ==
          doctest::Approx(std::exp(-lam * (50.0 + e1))).epsilon(1e-12));
    // NLoS first branch: q' < x.
    CHECK(g_cond_1d(p, LinkState::Nlos, 100.0, 50.0, 10.0) ==
          doctest::Approx(std::exp(-2.0 * lam * 100.0)).epsilon(1e-12));
    CHECK(g_cond_1d(p, LinkState::Nlos, 40.0, 50.0, 10.0) == 0.0);  // x < q
}

TEST_CASE("g_1d: anchors and expectation consistency") {
    const NetworkParams1D p = reference_1d();
    CHECK(g_1d(p, LinkState::Los, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g_1d(p, LinkState::Nlos, 0.0) == doctest::Approx(0.0));
    for (double x : {1.0, 10.0, 50.0, 200.0}) {
        for (LinkState s : {LinkState::Los, LinkState::Nlos}) {
            const double closed = g_1d(p, s, x);
            const double expect = expectation_of_cond(p, s, x);
            CHECK(closed == doctest::Approx(expect).epsilon(1e-8));
        }
    }
}

TEST_CASE("g_1d_bplp: matches the generic form, continuous at branch edges") {
    const NetworkParams1D p = reference_1d();
    for (double x : {0.5, 1.0, 2.0, 5.0, 10.0, 80.0}) {
        for (LinkState s : {LinkState::Los, LinkState::Nlos}) {
            CHECK(g_1d_bplp(p, s, x) == doctest::Approx(g_1d(p, s, x)).epsilon(1e-10));
        }
    }
    // The NLoS exclusion radius is continuous at its branch edge, so g_N is
    // too. The LoS branch edge carries a genuine O(lambda mu (lambda+mu))
    // jump: e1 leaps from 0 to 1 m where ell_L(x) crosses the NLoS
    // near-field plateau, so the branches agree only to that order.
    const double edge = std::pow(p.pathloss.c_ratio, -1.0 / p.pathloss.alpha_ratio);
    CHECK(std::fabs(g_1d_bplp(p, LinkState::Los, edge * (1 - 1e-9)) -
                    g_1d_bplp(p, LinkState::Los, edge * (1 + 1e-9))) < 5e-5);
    CHECK(g_1d_bplp(p, LinkState::Nlos, 1.0 - 1e-9) ==
          doctest::Approx(g_1d_bplp(p, LinkState::Nlos, 1.0 + 1e-9)).epsilon(1e-7));
}

TEST_CASE("g_1d_iba: anchors and the zero-NLoS closed form") {
    const NetworkParams1D p = reference_1d();
    CHECK(g_1d_iba(p, LinkState::Los, 0.0) == doctest::Approx(1.0));
    CHECK(g_1d_iba(p, LinkState::Nlos, 0.0) == doctest::Approx(0.0));
    // lambda/mu = 1 with zero NLoS law: integral of 2 lambda g = 1 - e^-2.
    const NetworkParams1D lap = lap_1d(0.005, 0.005);
    CHECK(assoc_prob_1d_iba(lap, LinkState::Los) ==
          doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-8));
}

TEST_CASE("big_g_1d and association probabilities") {
    const NetworkParams1D p = reference_1d();
    CHECK(big_g_1d(p, LinkState::Los, 4000.0) == doctest::Approx(0.0).epsilon(1e-9));
    const double total =
        assoc_prob_1d(p, LinkState::Los) + assoc_prob_1d(p, LinkState::Nlos);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    // Zero-NLoS closed form at five density ratios.
    for (double ratio : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        const NetworkParams1D lap = lap_1d(ratio * 0.007, 0.007);
        const double want = ratio * (2.0 + ratio) / ((1.0 + ratio) * (1.0 + ratio));
        CHECK(assoc_prob_1d(lap, LinkState::Los) == doctest::Approx(want).epsilon(1e-8));
        CHECK(std::fabs(assoc_prob_1d(lap, LinkState::Los) -
                        (1.0 - 1.0 / ((1.0 + ratio) * (1.0 + ratio)))) < 1e-8);
    }
    CHECK(assoc_prob_1d(lap_1d(0.007, 0.007), LinkState::Los) ==
          doctest::Approx(0.75).epsilon(1e-8));
    // Vanishing blockage density pushes everything to LoS.
    NetworkParams1D thin = p;
    thin.mu = 1e-9;
    CHECK(assoc_prob_1d(thin, LinkState::Los) == doctest::Approx(1.0).epsilon(1e-6));
    // Independence assumption overestimates LoS association.
    for (double mu : {0.002, 0.007, 0.02}) {
        NetworkParams1D q = p;
        q.mu = mu;
        CHECK(assoc_prob_1d_iba(q, LinkState::Los) + 1e-9 >=
              assoc_prob_1d(q, LinkState::Los));
    }
}

TEST_CASE("lt_interference_cond_1d: trivial values and preconditions") {
    const NetworkParams1D p = reference_1d();
    CHECK(lt_interference_cond_1d(p, LinkState::Los, 50.0, 80.0, 30.0, 0.0) == 1.0);
    CHECK_THROWS_AS(lt_interference_cond_1d(p, LinkState::Los, 90.0, 80.0, 30.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(lt_interference_cond_1d(p, LinkState::Nlos, 50.0, 80.0, 30.0, 1.0),
                    std::invalid_argument);
    const double v = lt_interference_cond_1d(p, LinkState::Los, 50.0, 80.0, 30.0, 1e9);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
}

TEST_CASE("lt_interference_cond_1d: conditioned-scene MC oracle") {
    const NetworkParams1D p = reference_1d();
    const double x = 50.0, q = 80.0, qp = 30.0, s = 1e9;
    const double e1 = excl_e1(p.pathloss, x);
    REQUIRE(e1 < qp);

    // Interferer regions conditioned on (LoS serving at x, q, q'):
    // LoS right on (x, q); NLoS right on (q, T); LoS left on (x, q') empty
    // here since q' < x; NLoS left on (max(e1, q'), T).
    const double t_max = 2e4;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto exp1 = [&]() { return -std::log1p(-uni(rng)); };
    auto poisson = [&](double mean) {
        int n = 0;
        for (double acc = exp1(); acc <= mean; acc += exp1()) ++n;
        return n;
    };
    const int n_scenes = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int scene = 0; scene < n_scenes; ++scene) {
        double interf = 0.0;
        const int n_los = poisson(p.lambda * (q - x));
        for (int i = 0; i < n_los; ++i) {
            const double y = x + (q - x) * uni(rng);
            interf += exp1() * ell(p.pathloss, LinkState::Los, y);
        }
        const int n_nlos_r = poisson(p.lambda * (t_max - q));
        for (int i = 0; i < n_nlos_r; ++i) {
            const double y = q + (t_max - q) * uni(rng);
            interf += exp1() * ell(p.pathloss, LinkState::Nlos, y);
        }
        const double left_lo = std::max(e1, qp);
        const int n_nlos_l = poisson(p.lambda * (t_max - left_lo));
        for (int i = 0; i < n_nlos_l; ++i) {
            const double y = left_lo + (t_max - left_lo) * uni(rng);
            interf += exp1() * ell(p.pathloss, LinkState::Nlos, y);
        }
        const double val = std::exp(-s * interf);
        sum += val;
        sum_sq += val * val;
    }
    const double mean = sum / n_scenes;
    const double se = std::sqrt((sum_sq / n_scenes - mean * mean) / n_scenes);
    const double analytic = lt_interference_cond_1d(p, LinkState::Los, x, q, qp, s);
    CHECK(std::fabs(analytic - mean) <= 3.0 * se + 1e-5);
}

TEST_CASE("coverage_1d: limits and a literal triple-quadrature cross-check") {
    const NetworkParams1D p = reference_1d();
    CHECK(coverage_1d(p, 0.0) == doctest::Approx(1.0).epsilon(1e-3));
    const NetworkParams1D lap = lap_1d(0.01, 0.007);
    CHECK(coverage_1d(lap, 1e-9) ==
          doctest::Approx(assoc_prob_1d(lap, LinkState::Los)).epsilon(1e-4));

    // Literal nested (x, q, q') quadrature of the coverage triple integral,
    // using the standalone conditional LT; slow but structurally independent
    // of the factorized evaluation path.
    const double tau = 1.0;
    num::QuadSpec spec;
    spec.rel_tol = 1e-5;
    spec.abs_tol = 1e-9;
    spec.tail_cutoff_exponent = 22.0;
    const auto brute_branch = [&](LinkState s) {
        return 2.0 * p.lambda *
               num::integrate_exp_tail(
                   [&](double x) {
                       const double l = ell(p.pathloss, s, x);
                       if (!(l > 0)) return 0.0;
                       const double noise = std::exp(-tau * p.noise_power / l);
                       const auto inner_q = [&](double q) {
                           const auto inner_qp = [&](double qp) {
                               const double g = g_cond_1d(p, s, x, q, qp);
                               if (g <= 0) return 0.0;
                               return p.mu * std::exp(-p.mu * qp) * g *
                                      lt_interference_cond_1d(p, s, x, q, qp, tau / l);
                           };
                           return p.mu * std::exp(-p.mu * q) *
                                  num::integrate_exp_tail(inner_qp, 0.0, p.mu, spec);
                       };
                       double q_integral;
                       if (s == LinkState::Los)
                           q_integral = num::integrate_exp_tail(inner_q, x, p.mu, spec);
                       else
                           q_integral = num::integrate(inner_q, 0.0, x, spec);
                       return noise * q_integral;
                   },
                   0.0, p.lambda, spec);
    };
    const double brute = brute_branch(LinkState::Los) + brute_branch(LinkState::Nlos);
    CHECK(coverage_1d(p, tau) == doctest::Approx(brute).epsilon(2e-3));
}

TEST_CASE("coverage_1d: monotone in the threshold; correlation gap at 0 dB") {
    const NetworkParams1D p = reference_1d();
    double prev = 2.0;
    for (int i = 0; i < 40; ++i) {
        const double db = -10.0 + i;  // 40-point dB grid
        const double c = coverage_1d(p, std::pow(10.0, db / 10.0));
        CHECK(c <= prev + 1e-6);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        prev = c;
    }
    const double corr = coverage_1d(p, 1.0);
    const double iba = coverage_1d_iba(p, 1.0);
    CHECK(iba > corr + 0.01);
}

TEST_CASE("coverage_1d_iba: reduces to the correlated value without blockages") {
    NetworkParams1D p = reference_1d();
    p.mu = 1e-7;
    const double corr = coverage_1d(p, 1.0);
    const double iba = coverage_1d_iba(p, 1.0);
    CHECK(corr == doctest::Approx(iba).epsilon(1e-3));
}
