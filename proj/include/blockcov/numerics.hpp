#pragma once

#include <functional>

#include "blockcov/errors.hpp"

namespace blockcov::num {

// Tolerances and budgets for the adaptive quadrature. The integration error
// target is max(abs_tol, rel_tol * |result|). Improper upper limits are
// truncated where the caller-supplied exponential envelope has decayed by
// exp(-tail_cutoff_exponent) relative to the lower limit.
struct QuadSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 4000;
    double tail_cutoff_exponent = 30.0;

    void validate() const;
};

// Default spec for inner integrals of nested (double/triple) quadratures;
// looser so the total cost of a nested evaluation stays bounded.
QuadSpec inner_quad_spec();

using Fn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (G7,K15) integration of f over the finite [a, b].
// Throws NonConvergence when max_subdivisions is exhausted above tolerance.
double integrate(const Fn& f, double a, double b, const QuadSpec& spec = {});

// Integral of f over [a, inf) for integrands dominated by an exponential
// envelope exp(-envelope_rate * x): truncates at
// a + tail_cutoff_exponent / envelope_rate and integrates the finite piece.
double integrate_exp_tail(const Fn& f, double a, double envelope_rate,
                          const QuadSpec& spec = {});

// Integral of f over [a, inf) for integrands with a (faster than 1/x)
// polynomially decaying tail and no usable exponential envelope: sums
// geometrically growing panels until two consecutive panels contribute less
// than abs_tol / 4 each. Intended for interference kernels.
double integrate_poly_tail(const Fn& f, double a, const QuadSpec& spec = {});

// Modified Bessel function of the first kind, order n in {0, 1}.
// Power series below the switchover, asymptotic expansion above; relative
// error <= 1e-10 for x <= 50. Throws OverflowError instead of returning inf.
double bessel_i(int n, double x);

// Root of a monotone function bracketed by [lo, hi], located by bisection to
// a bracket of width tol. Throws NoBracket when f(lo), f(hi) share a sign.
double find_root_increasing(const Fn& f, double lo, double hi, double tol);

// First y in [lo, hi] where the monotone (false...false,true...true)
// predicate becomes true, to within tol. Returns hi if it never does.
double find_first_true(const std::function<bool(double)>& pred, double lo,
                       double hi, double tol);

}  // namespace blockcov::num
