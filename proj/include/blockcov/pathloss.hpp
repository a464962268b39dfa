#pragma once

#include <functional>
#include <limits>

#include "blockcov/errors.hpp"

namespace blockcov {

enum class LinkState { Los, Nlos };

enum class PathKind {
    Bplp,   // bounded power law: min(C_s, C_s x^-alpha_s) per link type
    Lap,    // LoS association only: NLoS branch identically zero
    Custom  // caller-supplied monotone bounded pair
};

// Sentinel for "no finite exclusion radius" (NLoS serving impossible).
inline constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

// Path-loss law pair (LoS, NLoS) with the near-field gains folded in, plus
// the derived constants used by the closed-form exclusion radii. Distances
// in meters, gains in watts at 1 m with transmit power included. Immutable
// after construction; all operations on it are pure.
struct PathLossSpec {
    PathKind kind = PathKind::Bplp;
    double alpha_los = 2.0;
    double alpha_nlos = 4.0;
    double gain_los = 1.0;   // C_L
    double gain_nlos = 0.1;  // C_N
    std::function<double(double)> custom_los;
    std::function<double(double)> custom_nlos;
    double custom_grid_max = 1e4;  // validation/search horizon for Custom

    // alpha = alpha_L / alpha_N and c = (C_N / C_L)^(1/alpha_N).
    double alpha_ratio = 0.5;
    double c_ratio = 0.5;

    static PathLossSpec bplp(double gain_los, double alpha_los, double gain_nlos,
                             double alpha_nlos);
    static PathLossSpec lap(double gain_los, double alpha_los);
    // Validates monotonicity, LoS dominance and boundedness on a 1000-point
    // grid over [0, grid_max]; throws std::invalid_argument on violation.
    static PathLossSpec custom(std::function<double(double)> los,
                               std::function<double(double)> nlos,
                               double grid_max = 1e4);
};

// Received power (W) from a BS of the given type at distance x.
double ell(const PathLossSpec& spec, LinkState s, double x);

// Exclusion radius for NLoS BSs when the serving BS is LoS at distance x:
// min_y { y : ell_N(y) <= ell_L(x) }. Always <= x.
double excl_e1(const PathLossSpec& spec, double x);

// Exclusion radius for LoS BSs when the serving BS is NLoS at distance x:
// min_y { y : ell_L(y) <= ell_N(x) }. Always >= x; kInfiniteRadius when no
// finite y qualifies (LAP, or a Custom spec with no crossing in range).
double excl_e2(const PathLossSpec& spec, double x);

}  // namespace blockcov
