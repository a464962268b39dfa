#pragma once

// Internal helpers shared by the joint-LoS geometry and the 2D analysis
// engine: the parallelogram overlap correction at a fixed orientation,
// already averaged over the blockage length law, and the orientation values
// where that integrand has kinks.

#include <algorithm>
#include <cmath>
#include <vector>

#include "blockcov/blockage.hpp"

namespace blockcov::geom {

inline constexpr double kPi = M_PI;

// E_L[l^2 u(2-u)] * L_max for L ~ Uniform(0, L_max) with u = min(1, a/l).
inline double length_weighted_overlap_uniform(double a, double l_max) {
    if (a <= 0) return 0.0;
    if (a >= l_max) return l_max * l_max * l_max / 3.0;
    return a * l_max * l_max - a * a * l_max + a * a * a / 3.0;
}

// Overlap correction at one orientation delta > theta, averaged over length.
// The triangle's apex sits at leg coordinate l sin(delta)/sin(theta) along
// the first link and l sin(delta-theta)/sin(theta) along the second, so the
// length at which each far-edge cut reaches the apex pairs r1 with
// sin(delta) and r2 with sin(delta-theta).
inline double overlap_correction_at(const BlockageModel& m, double r1, double r2,
                                    double theta, double delta) {
    const double sin_t = std::sin(theta);
    const double sin_d = std::sin(delta);
    const double sin_dt = std::sin(delta - theta);
    if (!(sin_d > 0) || !(sin_dt > 0)) return 0.0;
    const double a1 = r1 * sin_t / sin_d;
    const double a2 = r2 * sin_t / sin_dt;
    const double a = std::min(a1, a2);
    const double geom = sin_d * sin_dt / (2.0 * sin_t);
    if (m.length.kind == LengthDist::Kind::Uniform) {
        const double l_max = m.length.param;
        return geom * length_weighted_overlap_uniform(a, l_max) / l_max;
    }
    const double l = m.length.param;
    const double u = std::min(1.0, a / l);
    return geom * l * l * u * (2.0 - u);
}

// Orientation values in (theta, pi) where the correction integrand has a
// kink: the leg-ratio switch and the saturation of each leg against the
// maximum blockage length.
inline std::vector<double> correction_breakpoints(const BlockageModel& m, double r1,
                                                  double r2, double theta) {
    std::vector<double> pts;
    const double sin_t = std::sin(theta);
    pts.push_back(std::atan2(r1 * sin_t, r1 * std::cos(theta) - r2));
    const double l_top = m.length.max_value();
    const double k1 = r1 * sin_t / l_top;
    if (k1 < 1.0) {
        pts.push_back(std::asin(k1));
        pts.push_back(kPi - std::asin(k1));
    }
    const double k2 = r2 * sin_t / l_top;
    if (k2 < 1.0) {
        pts.push_back(theta + std::asin(k2));
        pts.push_back(theta + kPi - std::asin(k2));
    }
    std::vector<double> out;
    for (double p : pts)
        if (p > theta + 1e-12 && p < kPi - 1e-12) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
              out.end());
    return out;
}

}  // namespace blockcov::geom
