#pragma once

#include <utility>

#include "blockcov/errors.hpp"
#include "blockcov/pathloss.hpp"

namespace blockcov {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// A linear blockage: center, length (m) and orientation (radians in [0, pi)).
struct Segment {
    Vec2 center;
    double length = 0.0;
    double orientation = 0.0;
};

struct LengthDist {
    enum class Kind { Uniform, Deterministic };
    Kind kind = Kind::Uniform;
    double param = 1.0;  // L_max for Uniform(0, L_max), the value otherwise

    static LengthDist uniform(double l_max);
    static LengthDist deterministic(double l);
    double mean() const;
    double max_value() const { return param; }
};

struct OrientationDist {
    enum class Kind { UniformPi, Deterministic };
    Kind kind = Kind::UniformPi;
    double value = 0.0;  // Deterministic only

    static OrientationDist uniform() { return {}; }
    static OrientationDist deterministic(double delta);
    bool is_uniform() const { return kind == Kind::UniformPi; }
    double mean_sin() const;
};

// Boolean segment process: centers form a PPP of density mu (per m^2 in 2D),
// each carrying an independent (length, orientation) mark.
struct BlockageModel {
    double mu = 0.0;
    LengthDist length = LengthDist::uniform(1.0);
    OrientationDist orientation = OrientationDist::uniform();

    void validate() const;
    // 2D blocking parameter: beta = 2 mu E[L] / pi.
    double beta() const;
};

// LoS probability of a single link of length r: exp(-beta r).
double los_prob(const BlockageModel& model, double r);

// Area of the union of the two blocking parallelograms for links of lengths
// r1 and r2 with angle theta in (0, pi] between them, against a blockage of
// length l whose angle to the second link is delta in [0, pi]. theta = 0 is
// evaluated as the analytic limit (the larger single parallelogram).
double parallelogram_union_area(double r1, double r2, double theta, double l, double delta);

// Expected overlap correction F'(r1, r2, theta) >= 0, so that the expected
// blocked-region measure is N = (beta/mu)(r1 + r2) - F'.
double f_prime(const BlockageModel& model, double r1, double r2, double theta);

// Expected blocked-region measure N(r1, r2, theta) = E[union area].
// Uses the (beta/mu)(r1+r2) - F' route when the orientation is uniform,
// the direct area expectation otherwise.
double curly_n(const BlockageModel& model, double r1, double r2, double theta);

// Direct evaluation route: E_{L,Delta}[parallelogram_union_area]. Agrees with
// curly_n to quadrature tolerance; kept separate as a cross-check.
double curly_n_area(const BlockageModel& model, double r1, double r2, double theta);

// Joint blocking-state probability of two links sharing the user endpoint.
// The four (s1, s2) values are consistent by construction: they sum to one
// and marginalize to los_prob. Throws InvalidGeometry if an intermediate
// value falls below -1e-9.
double joint_prob(const BlockageModel& model, LinkState s1, LinkState s2, double r1,
                  double r2, double theta);

// (lower, upper) bounds on the joint LoS probability: independent blocking
// below, the maximally correlated (infinite-length) case above.
std::pair<double, double> joint_prob_bounds(const BlockageModel& model, double r1,
                                            double r2, double theta);

// True iff the blockage segment intersects the open link (user, bs).
bool segment_blocks_link(const Segment& seg, Vec2 bs, Vec2 user);

}  // namespace blockcov
