#include "blockcov/pathloss.hpp"

#include <cmath>

#include "blockcov/numerics.hpp"

namespace blockcov {

namespace {

void set_derived(PathLossSpec& s) {
    s.alpha_ratio = s.alpha_los / s.alpha_nlos;
    s.c_ratio = std::pow(s.gain_nlos / s.gain_los, 1.0 / s.alpha_nlos);
}

double bounded_power_law(double gain, double alpha, double x) {
    if (x <= 1.0) return gain;
    return gain * std::pow(x, -alpha);
}

}  // namespace

PathLossSpec PathLossSpec::bplp(double gain_los, double alpha_los, double gain_nlos,
                                double alpha_nlos) {
    if (!(gain_los > gain_nlos) || !(gain_nlos > 0))
        throw std::invalid_argument("bplp: requires C_L > C_N > 0");
    if (!(alpha_los > 0) || !(alpha_nlos > 0))
        throw std::invalid_argument("bplp: exponents must be positive");
    PathLossSpec s;
    s.kind = PathKind::Bplp;
    s.alpha_los = alpha_los;
    s.alpha_nlos = alpha_nlos;
    s.gain_los = gain_los;
    s.gain_nlos = gain_nlos;
    set_derived(s);
    return s;
}

PathLossSpec PathLossSpec::lap(double gain_los, double alpha_los) {
    if (!(gain_los > 0) || !(alpha_los > 0))
        throw std::invalid_argument("lap: gain and exponent must be positive");
    PathLossSpec s;
    s.kind = PathKind::Lap;
    s.alpha_los = alpha_los;
    s.alpha_nlos = alpha_los;  // unused; keeps derived values finite
    s.gain_los = gain_los;
    s.gain_nlos = 0.0;
    s.alpha_ratio = 1.0;
    s.c_ratio = 0.0;
    return s;
}

PathLossSpec PathLossSpec::custom(std::function<double(double)> los,
                                  std::function<double(double)> nlos, double grid_max) {
    if (!los || !nlos) throw std::invalid_argument("custom: both functions required");
    if (!(grid_max > 0)) throw std::invalid_argument("custom: grid_max must be > 0");
    constexpr int kGrid = 1000;
    double prev_l = std::numeric_limits<double>::max();
    double prev_n = std::numeric_limits<double>::max();
    for (int i = 0; i <= kGrid; ++i) {
        const double x = grid_max * i / kGrid;
        const double vl = los(x), vn = nlos(x);
        if (!std::isfinite(vl) || !std::isfinite(vn) || vl < 0 || vn < 0)
            throw std::invalid_argument("custom: path-loss must be finite and nonnegative");
        if (vl < vn) throw std::invalid_argument("custom: ell_L < ell_N on validation grid");
        if (i > 0 && (vl > prev_l * (1 + 1e-12) || vn > prev_n * (1 + 1e-12)))
            throw std::invalid_argument("custom: path-loss increases on validation grid");
        prev_l = vl;
        prev_n = vn;
    }
    PathLossSpec s;
    s.kind = PathKind::Custom;
    s.custom_los = std::move(los);
    s.custom_nlos = std::move(nlos);
    s.custom_grid_max = grid_max;
    s.gain_los = s.custom_los(0.0);
    s.gain_nlos = s.custom_nlos(0.0);
    return s;
}

double ell(const PathLossSpec& spec, LinkState s, double x) {
    if (!(x >= 0)) throw std::invalid_argument("ell: x must be >= 0");
    switch (spec.kind) {
        case PathKind::Bplp:
            return s == LinkState::Los ? bounded_power_law(spec.gain_los, spec.alpha_los, x)
                                       : bounded_power_law(spec.gain_nlos, spec.alpha_nlos, x);
        case PathKind::Lap:
            return s == LinkState::Los ? bounded_power_law(spec.gain_los, spec.alpha_los, x)
                                       : 0.0;
        case PathKind::Custom:
            return s == LinkState::Los ? spec.custom_los(x) : spec.custom_nlos(x);
    }
    return 0.0;
}

double excl_e1(const PathLossSpec& spec, double x) {
    if (!(x >= 0)) throw std::invalid_argument("excl_e1: x must be >= 0");
    switch (spec.kind) {
        case PathKind::Lap:
            return 0.0;  // ell_N == 0 excludes nothing
        case PathKind::Bplp: {
            const double near_edge = std::pow(spec.c_ratio, -1.0 / spec.alpha_ratio);
            if (x <= near_edge) return 0.0;
            return spec.c_ratio * std::pow(x, spec.alpha_ratio);
        }
        case PathKind::Custom: {
            const double threshold = ell(spec, LinkState::Los, x);
            if (spec.custom_nlos(0.0) <= threshold) return 0.0;
            // ell_N(x) <= ell_L(x) guarantees a crossing at or before x.
            return num::find_first_true(
                [&](double y) { return spec.custom_nlos(y) <= threshold; }, 0.0, x,
                1e-10 * std::max(1.0, x));
        }
    }
    return 0.0;
}

double excl_e2(const PathLossSpec& spec, double x) {
    if (!(x >= 0)) throw std::invalid_argument("excl_e2: x must be >= 0");
    switch (spec.kind) {
        case PathKind::Lap:
            return kInfiniteRadius;  // no y satisfies ell_L(y) <= 0
        case PathKind::Bplp: {
            const double inv_alpha = 1.0 / spec.alpha_ratio;
            if (x <= 1.0) return std::pow(1.0 / spec.c_ratio, inv_alpha);
            return std::pow(x / spec.c_ratio, inv_alpha);
        }
        case PathKind::Custom: {
            const double threshold = ell(spec, LinkState::Nlos, x);
            const double hi = 10.0 * x + 1e4;
            if (spec.custom_los(hi) > threshold) return kInfiniteRadius;
            return num::find_first_true(
                [&](double y) { return spec.custom_los(y) <= threshold; }, 0.0, hi,
                1e-9 * std::max(1.0, x));
        }
    }
    return kInfiniteRadius;
}

}  // namespace blockcov
