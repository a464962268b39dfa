#pragma once

#include "blockcov/blockage.hpp"
#include "blockcov/errors.hpp"
#include "blockcov/pathloss.hpp"

namespace blockcov::twod {

// 2D network on the plane: BS PPP of density lambda (per m^2) and a Boolean
// segment blockage process. The analysis assumes uniformly distributed
// blockage orientations (the model is isotropic); validate() enforces this.
struct NetworkParams2D {
    double lambda = 0.0;  // BS per m^2
    BlockageModel blockage;
    PathLossSpec pathloss;
    double noise_power = 0.0;  // sigma_n^2, W
    double bandwidth = 1e9;    // Hz
    double user_density = 0.0; // per m^2

    void validate() const;
    double beta() const { return blockage.beta(); }
};

struct BoundPair {
    double lower = 0.0;
    double upper = 0.0;
};

// Blocking-correlation treatment of the analysis pipeline. Independent
// replaces every conditional joint probability p_{u,v}/p_u by the marginal
// p_v, which is the independent-blocking-assumption baseline.
enum class Correlation { Correlated, Independent };

struct RateAllocation {
    enum class Mode { EqualAll, LosOnly };
    Mode mode = Mode::EqualAll;

    // Mean number of users sharing the tagged BS bandwidth
    // (1 + 1.28 lambda_u / lambda, with A_L weighting for LoS-only service).
    double mean_users(const NetworkParams2D& p, double a_los) const;
};

// Slope of the linear sin^2 sandwich 1 + m(x - pi/2) <= sin^2 x <= m x on
// [0, pi/2]: the proof-side constant 1/1.38, the convention under which both
// inequalities hold on a verification grid.
inline constexpr double kSinSquaredSlope = 1.0 / 1.38;

// Probability that a BS at distance x is the serving BS and of the given
// type, under the first-order blocking-correlation approximation.
double g_2d(const NetworkParams2D& p, LinkState s, double x,
            Correlation mode = Correlation::Correlated);

// G_s(r) = 2 pi lambda int_r^inf g_s(x) x dx.
double big_g_2d(const NetworkParams2D& p, LinkState s, double r,
                Correlation mode = Correlation::Correlated);

// Association probability A_s = G_s(0).
double assoc_prob_2d(const NetworkParams2D& p, LinkState s,
                     Correlation mode = Correlation::Correlated);

// Closed-form bounds on A_L for the LoS-association-only path-loss: lower is
// the maximally correlated case, upper the independent-blocking value
// 1 - exp(-2 pi lambda / beta^2).
BoundPair assoc_bounds_2d(const NetworkParams2D& p);

// PDF of the serving-BS distance conditioned on serving type s.
// Throws DegenerateCondition when A_s vanishes.
double serving_pdf_2d(const NetworkParams2D& p, LinkState s, double x,
                      Correlation mode = Correlation::Correlated);

// Closed-form envelopes of g_s(x): for LoS, lower is the maximally
// correlated case and upper the independent-blocking case; for NLoS the
// ordering flips (g_N grows with correlation), so lower is the
// independent-blocking form and upper the maximally correlated form.
BoundPair g_2d_bounds(const NetworkParams2D& p, LinkState s, double x);

// Laplace transform of the type-v interference at argument nu, conditioned
// on a type-u serving BS at distance r.
double lt_interference_2d(const NetworkParams2D& p, LinkState v, LinkState u, double r,
                          double nu, Correlation mode = Correlation::Correlated);

// SINR coverage at linear threshold tau. tau <= 0 returns the total
// association probability.
double coverage_2d(const NetworkParams2D& p, double tau,
                   Correlation mode = Correlation::Correlated);

// One serving-type branch of the coverage sum (A_u * P(SINR > tau | E_u)).
double coverage_2d_branch(const NetworkParams2D& p, LinkState u, double tau,
                          Correlation mode = Correlation::Correlated);

// Closed-form coverage bounds for the LoS-association-only path-loss:
// lower from the maximally correlated forms, upper from the
// independent-blocking forms. Throws for other path-loss kinds.
BoundPair coverage_2d_bounds(const NetworkParams2D& p, double tau);

// Simplified closed-form bracket (g1, g2) around the maximally correlated
// g_L for the LoS-association-only path-loss, via the linear sin^2 bounds.
BoundPair g_lap_simple_bounds(const NetworkParams2D& p, double r);

// Rate coverage P(allocated-bandwidth Shannon rate > rho bit/s) under the
// mean-load model.
double rate_coverage_2d(const NetworkParams2D& p, const RateAllocation& alloc, double rho,
                        Correlation mode = Correlation::Correlated);

}  // namespace blockcov::twod
