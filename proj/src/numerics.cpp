#include "blockcov/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace blockcov::num {

void QuadSpec::validate() const {
    if (!(rel_tol > 0)) throw std::invalid_argument("QuadSpec: rel_tol must be > 0");
    if (!(abs_tol >= 0)) throw std::invalid_argument("QuadSpec: abs_tol must be >= 0");
    if (max_subdivisions < 1) throw std::invalid_argument("QuadSpec: max_subdivisions must be >= 1");
    if (!(tail_cutoff_exponent >= 10))
        throw std::invalid_argument("QuadSpec: tail_cutoff_exponent must be >= 10");
}

QuadSpec inner_quad_spec() {
    QuadSpec s;
    s.rel_tol = 1e-6;
    s.abs_tol = 1e-12;
    return s;
}

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
constexpr double kKronrodNodes[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
constexpr double kKronrodWeights[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kGaussWeights[4] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870};

struct PanelResult {
    double value;
    double error;
};

PanelResult gk15(const Fn& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k15 = kKronrodWeights[0] * f0;
    double g7 = kGaussWeights[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double fi = f(mid + dx) + f(mid - dx);
        k15 += kKronrodWeights[i] * fi;
        if (i % 2 == 0) g7 += kGaussWeights[i / 2] * fi;
    }
    k15 *= half;
    g7 *= half;
    const double diff = std::fabs(k15 - g7);
    // Standard QUADPACK-style sharpened error estimate.
    double err = diff;
    if (diff > 0) err = diff * std::min(1.0, std::pow(200.0 * diff, 1.5));
    return {k15, err};
}

struct Interval {
    double a, b, value, error;
};

}  // namespace

double integrate(const Fn& f, double a, double b, const QuadSpec& spec) {
    spec.validate();
    if (a == b) return 0.0;
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("integrate: bounds must be finite; use an *_tail variant");

    std::vector<Interval> intervals;
    intervals.reserve(64);
    PanelResult first = gk15(f, a, b);
    intervals.push_back({a, b, first.value, first.error});

    for (int iter = 0; iter < spec.max_subdivisions; ++iter) {
        double total = 0.0, toterr = 0.0;
        for (const Interval& iv : intervals) {
            total += iv.value;
            toterr += iv.error;
        }
        const double target = std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
        if (toterr <= target) return total;

        // Split the interval with the largest error estimate.
        std::size_t worst = 0;
        for (std::size_t i = 1; i < intervals.size(); ++i)
            if (intervals[i].error > intervals[worst].error) worst = i;
        const Interval iv = intervals[worst];
        const double m = 0.5 * (iv.a + iv.b);
        if (m <= iv.a || m >= iv.b) {
            // Interval at floating-point resolution; accept its estimate.
            intervals[worst].error = 0.0;
            continue;
        }
        PanelResult left = gk15(f, iv.a, m);
        PanelResult right = gk15(f, m, iv.b);
        intervals[worst] = {iv.a, m, left.value, left.error};
        intervals.push_back({m, iv.b, right.value, right.error});
    }

    double total = 0.0, toterr = 0.0;
    for (const Interval& iv : intervals) {
        total += iv.value;
        toterr += iv.error;
    }
    if (toterr <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(total))) return total;
    throw NonConvergence("integrate: error " + std::to_string(toterr) +
                         " above tolerance after max_subdivisions");
}

double integrate_exp_tail(const Fn& f, double a, double envelope_rate, const QuadSpec& spec) {
    if (!(envelope_rate > 0))
        throw std::invalid_argument("integrate_exp_tail: envelope_rate must be > 0");
    const double b = a + spec.tail_cutoff_exponent / envelope_rate;
    return integrate(f, a, b, spec);
}

double integrate_poly_tail(const Fn& f, double a, const QuadSpec& spec) {
    spec.validate();
    double total = 0.0;
    double lo = a;
    double width = std::max(1.0, std::fabs(a));
    const double panel_tol = std::max(spec.abs_tol, 1e-14) / 4.0;
    int quiet_panels = 0;
    for (int k = 0; k < 80; ++k) {
        const double hi = lo + width;
        const double piece = integrate(f, lo, hi, spec);
        total += piece;
        if (std::fabs(piece) < std::max(panel_tol, spec.rel_tol * std::fabs(total) / 4.0)) {
            if (++quiet_panels >= 2) return total;
        } else {
            quiet_panels = 0;
        }
        lo = hi;
        width *= 2.0;
    }
    throw NonConvergence("integrate_poly_tail: tail did not settle within panel budget");
}

namespace {

double bessel_i_series(int n, double x) {
    // I_n(x) = sum_k (x/2)^(2k+n) / (k! (k+n)!); all terms positive.
    const double q = 0.25 * x * x;
    double term = (n == 0) ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= q / (static_cast<double>(k) * (k + n));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

double bessel_i_asymptotic(int n, double x) {
    // I_n(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(n) / x^k,
    // a_k = prod_{j=1..k} (4n^2 - (2j-1)^2) / (k 8).
    const double mu = 4.0 * n * n;
    double term = 1.0, sum = 1.0, prev = std::numeric_limits<double>::max();
    for (int k = 1; k < 60; ++k) {
        const double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= -num / (8.0 * k * x);
        if (std::fabs(term) >= prev) break;  // divergent part reached
        sum += term;
        prev = std::fabs(term);
        if (prev < 1e-17 * std::fabs(sum)) break;
    }
    return std::exp(x) / std::sqrt(2.0 * M_PI * x) * sum;
}

}  // namespace

double bessel_i(int n, double x) {
    if (n != 0 && n != 1) throw std::invalid_argument("bessel_i: order must be 0 or 1");
    if (!(x >= 0)) throw std::invalid_argument("bessel_i: x must be >= 0");
    if (x > 709.0) throw OverflowError("bessel_i: argument " + std::to_string(x) +
                                       " exceeds representable range");
    if (x < 15.0) return bessel_i_series(n, x);
    return bessel_i_asymptotic(n, x);
}

double find_root_increasing(const Fn& f, double lo, double hi, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("find_root_increasing: tol must be > 0");
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw NoBracket("find_root_increasing: f(lo) and f(hi) have the same sign");
    const bool increasing = fhi > flo;
    while (hi - lo > tol) {
        const double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        const double fm = f(m);
        if (fm == 0) return m;
        if ((fm > 0) == increasing)
            hi = m;
        else
            lo = m;
    }
    return 0.5 * (lo + hi);
}

double find_first_true(const std::function<bool(double)>& pred, double lo, double hi,
                       double tol) {
    if (pred(lo)) return lo;
    if (!pred(hi)) return hi;
    while (hi - lo > tol) {
        const double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        if (pred(m))
            hi = m;
        else
            lo = m;
    }
    return hi;
}

}  // namespace blockcov::num
