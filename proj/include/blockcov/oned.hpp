#pragma once

#include "blockcov/errors.hpp"
#include "blockcov/pathloss.hpp"

namespace blockcov::oned {

// 1D network on the real line: BS PPP of density lambda, point blockages of
// density mu (the 1D blocking parameter beta equals mu). SI units
// throughout: per-meter densities, watts, hertz.
struct NetworkParams1D {
    double lambda = 0.0;       // BS per m
    double mu = 0.0;           // blockages per m
    PathLossSpec pathloss;
    double noise_power = 0.0;  // sigma_n^2, W
    double bandwidth = 1e9;    // Hz
    double user_density = 0.0; // per m, rate metrics only

    void validate() const;
};

// Probability that the BS at distance x (one side) is serving and of the
// given type, conditioned on the nearest-blockage distances q (same side as
// the BS) and q' (opposite side).
double g_cond_1d(const NetworkParams1D& p, LinkState s, double x, double q,
                 double q_prime);

// The (q, q')-expectation of g_cond_1d in closed form.
double g_1d(const NetworkParams1D& p, LinkState s, double x);

// Closed form specialized to the bounded power-law pair; equals g_1d.
double g_1d_bplp(const NetworkParams1D& p, LinkState s, double x);

// Counterpart under the independent blocking assumption.
double g_1d_iba(const NetworkParams1D& p, LinkState s, double x);

// Probability that the serving BS is of the given type and farther than r:
// G_s(r) = 2 lambda int_r^inf g_s(x) dx.
double big_g_1d(const NetworkParams1D& p, LinkState s, double r);

// Association probabilities A_s = G_s(0), correlated and independent.
double assoc_prob_1d(const NetworkParams1D& p, LinkState s);
double assoc_prob_1d_iba(const NetworkParams1D& p, LinkState s);

// Laplace transform of the interference at the typical user conditioned on
// the serving BS type/distance and both nearest-blockage distances.
// Requires x < q for LoS serving and x >= q for NLoS serving.
double lt_interference_cond_1d(const NetworkParams1D& p, LinkState s, double x,
                               double q, double q_prime, double lt_arg);

// SINR coverage probability at linear threshold tau (correlated blocking).
// tau <= 0 returns the total association probability.
double coverage_1d(const NetworkParams1D& p, double tau);

// Baseline with every link's blocking state drawn independently.
double coverage_1d_iba(const NetworkParams1D& p, double tau);

}  // namespace blockcov::oned
