#include "blockcov/twod.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "blockcov/numerics.hpp"
#include "geom_detail.hpp"
#include "parallel.hpp"

namespace blockcov::twod {

namespace {

constexpr double kPi = M_PI;
constexpr double kTwoPi = 2.0 * M_PI;

double kernel(double nu, double l) {
    if (!(nu > 0) || !(l > 0)) return 0.0;
    const double p = nu * l;
    return p / (1.0 + p);
}

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kGl8Nodes[4] = {0.1834346424956498, 0.5255324099163290,
                                 0.7966664774136267, 0.9602898564975363};
constexpr double kGl8Weights[4] = {0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};

template <class F>
double gl8(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double dx = half * kGl8Nodes[i];
        sum += kGl8Weights[i] * (f(mid + dx) + f(mid - dx));
    }
    return sum * half;
}

// F'(r1, r2, theta) with fixed panel rules per smooth piece; the engine's
// hot path (the adaptive public f_prime lives in blockage.cpp).
double f_prime_fixed(const BlockageModel& m, double r1, double r2, double theta) {
    if (!(r1 > 0) || !(r2 > 0)) return 0.0;
    if (theta >= kPi - 1e-12) return 0.0;
    if (theta < 1e-9) return m.length.mean() * m.orientation.mean_sin() * std::min(r1, r2);
    const auto breaks = geom::correction_breakpoints(m, r1, r2, theta);
    const auto f = [&](double d) { return geom::overlap_correction_at(m, r1, r2, theta, d); };
    double total = 0.0;
    double a = theta;
    for (double b : breaks) {
        total += gl8(f, a, 0.5 * (a + b)) + gl8(f, 0.5 * (a + b), b);
        a = b;
    }
    total += gl8(f, a, 0.5 * (a + kPi)) + gl8(f, 0.5 * (a + kPi), kPi);
    return total / kPi;
}

// V(r, t) = 2 int_0^pi exp(mu F'(r, t, theta)) dtheta, so that the
// theta-integrated joint LoS probability is e^(-beta(r+t)) V(r, t).
// V is symmetric and lies in [2 pi, 2 pi e^(beta min(r,t))].
double v_direct(const BlockageModel& m, double a, double b) {
    if (!(m.mu > 0)) return kTwoPi;
    const auto f = [&](double th) { return std::exp(m.mu * f_prime_fixed(m, a, b, th)); };
    double total = 0.0;
    constexpr int kPanels = 12;
    for (int k = 0; k < kPanels; ++k)
        total += gl8(f, kPi * k / kPanels, kPi * (k + 1) / kPanels);
    return 2.0 * total;
}

double catmull_rom(double p0, double p1, double p2, double p3, double t) {
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
}

// Memoized log V on a uniform (min, max) distance lattice, bicubic between
// nodes; interpolation error budget ~1e-5 on the log.
class VTable {
  public:
    VTable(const BlockageModel& m, double extent) : model_(m), amax_(extent) {
        logv_.resize(static_cast<std::size_t>(kNa) * kNb);
        par::parallel_for(kNa, [&](std::int64_t i) {
            const double a = amax_ * static_cast<double>(i) / (kNa - 1);
            for (int j = 0; j < kNb; ++j) {
                const double b = amax_ * static_cast<double>(j) / (kNb - 1);
                logv_[static_cast<std::size_t>(i) * kNb + j] =
                    std::log(v_direct(model_, std::min(a, b), std::max(a, b)));
            }
        });
    }

    double log_v(double a, double b) const {
        if (a > b) std::swap(a, b);
        a = std::clamp(a, 0.0, amax_);
        b = std::clamp(b, 0.0, amax_);
        const double fa = a / amax_ * (kNa - 1);
        const double fb = b / amax_ * (kNb - 1);
        const int i = std::min(static_cast<int>(fa), kNa - 2);
        const int j = std::min(static_cast<int>(fb), kNb - 2);
        const double ta = fa - i, tb = fb - j;
        double rows[4];
        for (int di = -1; di <= 2; ++di) {
            const int ii = std::clamp(i + di, 0, kNa - 1);
            const double* row = &logv_[static_cast<std::size_t>(ii) * kNb];
            const int j0 = std::clamp(j - 1, 0, kNb - 1);
            const int j2 = std::clamp(j + 1, 0, kNb - 1);
            const int j3 = std::clamp(j + 2, 0, kNb - 1);
            rows[di + 1] = catmull_rom(row[j0], row[j], row[j2], row[j3], tb);
        }
        return catmull_rom(rows[0], rows[1], rows[2], rows[3], ta);
    }

    double extent() const { return amax_; }

  private:
    static constexpr int kNa = 224;
    static constexpr int kNb = 160;
    BlockageModel model_;
    double amax_;
    std::vector<double> logv_;
};

using VKey = std::tuple<double, int, double, int, double, double>;

// Lattices are small (~300 KB) and parameter sets few, so keep them alive
// across calls; evict in insertion order past a generous cap.
std::shared_ptr<const VTable> v_table_for(const BlockageModel& m, double extent) {
    static std::mutex mu;
    static std::map<VKey, std::shared_ptr<const VTable>> cache;
    static std::vector<VKey> order;
    const VKey key{m.mu, static_cast<int>(m.length.kind), m.length.param,
                   static_cast<int>(m.orientation.kind), m.orientation.value, extent};
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto sp = std::make_shared<const VTable>(m, extent);
    std::lock_guard<std::mutex> lock(mu);
    if (cache.emplace(key, sp).second) {
        order.push_back(key);
        if (order.size() > 64) {
            cache.erase(order.front());
            order.erase(order.begin());
        }
    }
    return sp;
}

// Per-call evaluation context: parameters, mode, and the shared V lattice.
struct Ctx {
    const NetworkParams2D& p;
    Correlation mode;
    double beta;
    double lam;
    std::shared_ptr<const VTable> table;

    Ctx(const NetworkParams2D& params, Correlation m) : p(params), mode(m) {
        p.validate();
        beta = p.beta();
        lam = p.lambda;
        // Skip the correlation lattice when the largest possible exponent
        // mu F' <= beta * min(r, t) is negligible over the active geometry.
        if (mode == Correlation::Correlated && p.blockage.mu > 0 &&
            beta * geometry_extent() > 1e-7)
            table = v_table_for(p.blockage, geometry_extent());
    }

    // Largest distance the void/interference integrals can visit: the LoS
    // branch dies by exp(-beta x) or by the all-LoS void exp(-lam pi x^2),
    // the NLoS branch by the disk-x void exp(-lam pi x^2) alone.
    double cut_los() const {
        const double x1 = beta > 0 ? 46.0 / beta : std::numeric_limits<double>::infinity();
        const double x2 = std::sqrt(46.0 / (lam * kPi));
        if (lam * kPi * x2 * x2 * std::exp(-beta * x2) >= 45.0) return std::min(x1, 1.05 * x2);
        return x1;
    }
    double cut_nlos() const { return std::sqrt(48.0 / (lam * kPi)); }
    double cut_for(LinkState s) const {
        return s == LinkState::Los ? cut_los() : cut_nlos();
    }
    double geometry_extent() const {
        return 1.05 * std::max(cut_los(), cut_nlos()) + 1.0;
    }

    double v_factor(double r, double t) const {
        if (!table) return kTwoPi;
        return std::exp(table->log_v(r, t));
    }

    // int_0^{2 pi} p_{u,v}(r, t, theta) / p_u(r) dtheta.
    double jcond(LinkState u, LinkState v, double r, double t) const {
        const double evt = std::exp(-beta * t);
        if (u == LinkState::Los) {
            const double m = evt * v_factor(r, t);
            return v == LinkState::Los ? m : kTwoPi - m;
        }
        const double pn = -std::expm1(-beta * r);
        if (!(pn > 0)) return v == LinkState::Los ? kTwoPi * evt : kTwoPi * (1.0 - evt);
        const double evr = std::exp(-beta * r);
        if (v == LinkState::Los) return evt * (kTwoPi - evr * v_factor(r, t)) / pn;
        const double m = evt * v_factor(r, t);
        return (kTwoPi * (1.0 - evr - evt) + evr * m) / pn;
    }

    // Distance beyond which exp(-beta t) has decayed past the tail cutoff.
    double exp_cut(double from) const {
        return beta > 0 ? from + 42.0 / beta : std::numeric_limits<double>::infinity();
    }

    double g(LinkState s, double x) const {
        if (!(x >= 0)) throw std::invalid_argument("g_2d: x must be >= 0");
        num::QuadSpec spec = num::inner_quad_spec();
        spec.rel_tol = 1e-7;
        if (s == LinkState::Los) {
            if (x == 0) return 1.0;
            const double e1 = excl_e1(p.pathloss, x);
            double expo = num::integrate(
                [&](double t) { return jcond(LinkState::Los, LinkState::Los, x, t) * t; }, 0.0,
                x, spec);
            if (e1 > 0)
                expo += num::integrate(
                    [&](double t) { return jcond(LinkState::Los, LinkState::Nlos, x, t) * t; },
                    0.0, e1, spec);
            return std::exp(-beta * x - lam * expo);
        }
        const double pn = -std::expm1(-beta * x);
        if (!(pn > 0)) return 0.0;
        if (!(ell(p.pathloss, LinkState::Nlos, x) > 0)) return 0.0;
        // The NLoS void contains the whole disk of radius x.
        if (lam * kPi * x * x > 745.0) return 0.0;
        const double e2 = excl_e2(p.pathloss, x);
        const double hi = std::min(e2, exp_cut(x));
        if (!std::isfinite(hi)) return 0.0;  // unbounded LoS void
        double expo = num::integrate(
            [&](double t) { return jcond(LinkState::Nlos, LinkState::Los, x, t) * t; }, 0.0, hi,
            spec);
        expo += num::integrate(
            [&](double t) { return jcond(LinkState::Nlos, LinkState::Nlos, x, t) * t; }, 0.0, x,
            spec);
        return pn * std::exp(-lam * expo);
    }

    double exclusion(LinkState v, LinkState u, double r) const {
        if (u == v) return r;
        return u == LinkState::Los ? excl_e1(p.pathloss, r) : excl_e2(p.pathloss, r);
    }

    double kappa(LinkState v, LinkState u, double r, double nu) const {
        if (!(nu > 0)) return 1.0;
        const double e = exclusion(v, u, r);
        if (!std::isfinite(e)) return 1.0;
        num::QuadSpec spec = num::inner_quad_spec();
        const auto integrand = [&](double t) {
            return kernel(nu, ell(p.pathloss, v, t)) * jcond(u, v, r, t) * t;
        };
        double expo;
        if (v == LinkState::Los) {
            if (beta > 0) {
                expo = num::integrate(integrand, e, std::max(exp_cut(r), e + 1.0), spec);
            } else {
                num::QuadSpec tail = spec;
                tail.abs_tol = 1e-9 / std::max(lam, 1e-30);
                expo = num::integrate_poly_tail(integrand, e, tail);
            }
        } else {
            if (!(ell(p.pathloss, LinkState::Nlos, std::max(r, 1.0)) > 0 ||
                  ell(p.pathloss, LinkState::Nlos, 0.0) > 0))
                return 1.0;
            num::QuadSpec tail = spec;
            tail.abs_tol = 1e-9 / std::max(lam, 1e-30);
            expo = num::integrate_poly_tail(integrand, e, tail);
        }
        return std::exp(-lam * expo);
    }
};

double big_g_ctx(const Ctx& ctx, LinkState s, double r) {
    num::QuadSpec spec;
    spec.rel_tol = 1e-7;
    spec.abs_tol = 1e-12;
    const double hi = ctx.cut_for(s);
    if (r >= hi) return 0.0;
    return kTwoPi * ctx.lam *
           num::integrate([&](double x) { return ctx.g(s, x) * x; }, r, hi, spec);
}

double coverage_branch_ctx(const Ctx& ctx, LinkState u, double tau) {
    const NetworkParams2D& p = ctx.p;
    const auto integrand = [&](double r) {
        const double l_u = ell(p.pathloss, u, r);
        if (!(l_u > 0)) return 0.0;
        const double noise_expo = tau * p.noise_power / l_u;
        if (noise_expo > 700.0) return 0.0;
        const double gv = ctx.g(u, r);
        if (gv < 1e-300) return 0.0;
        const double nu = tau / l_u;
        return std::exp(-noise_expo) * ctx.kappa(LinkState::Los, u, r, nu) *
               ctx.kappa(LinkState::Nlos, u, r, nu) * gv * r;
    };
    num::QuadSpec spec;
    spec.rel_tol = 1e-5;
    spec.abs_tol = 1e-8;
    return kTwoPi * ctx.lam * num::integrate(integrand, 0.0, ctx.cut_for(u), spec);
}

double bessel_f_factor(double r, double beta) {
    if (!(r > 0)) return 0.0;
    const double z = 0.5 * beta * r;
    return r * std::exp(-z) *
           (beta * r * num::bessel_i(0, z) + (beta * r + 2.0) * num::bessel_i(1, z));
}

double f1_factor(double beta, double z) {
    if (!std::isfinite(z)) return 0.0;
    return (1.0 + beta * z) * std::exp(-beta * z);
}

}  // namespace

void NetworkParams2D::validate() const {
    if (!(lambda > 0)) throw std::invalid_argument("NetworkParams2D: lambda must be > 0");
    if (!(bandwidth > 0)) throw std::invalid_argument("NetworkParams2D: bandwidth must be > 0");
    if (!(noise_power >= 0)) throw std::invalid_argument("NetworkParams2D: noise_power must be >= 0");
    if (!(user_density >= 0)) throw std::invalid_argument("NetworkParams2D: user_density must be >= 0");
    blockage.validate();
    if (!blockage.orientation.is_uniform())
        throw std::invalid_argument(
            "NetworkParams2D: the 2D analysis requires uniform blockage orientation");
}

double RateAllocation::mean_users(const NetworkParams2D& p, double a_los) const {
    const double share = mode == Mode::EqualAll ? 1.0 : a_los;
    return 1.0 + 1.28 * p.user_density * share / p.lambda;
}

double g_2d(const NetworkParams2D& p, LinkState s, double x, Correlation mode) {
    return Ctx(p, mode).g(s, x);
}

double big_g_2d(const NetworkParams2D& p, LinkState s, double r, Correlation mode) {
    if (!(r >= 0)) throw std::invalid_argument("big_g_2d: r must be >= 0");
    return big_g_ctx(Ctx(p, mode), s, r);
}

double assoc_prob_2d(const NetworkParams2D& p, LinkState s, Correlation mode) {
    return big_g_2d(p, s, 0.0, mode);
}

BoundPair assoc_bounds_2d(const NetworkParams2D& p) {
    p.validate();
    const double beta = p.beta();
    if (!(beta > 0)) return {1.0, 1.0};
    const double upper = -std::expm1(-kTwoPi * p.lambda / (beta * beta));
    num::QuadSpec spec;
    spec.rel_tol = 1e-9;
    spec.abs_tol = 1e-13;
    spec.tail_cutoff_exponent = 42.0;
    const double lower =
        kTwoPi * p.lambda *
        num::integrate_exp_tail(
            [&](double x) {
                return std::exp(-beta * x -
                                kTwoPi * p.lambda / (3.0 * beta) * bessel_f_factor(x, beta)) *
                       x;
            },
            0.0, beta, spec);
    return {lower, upper};
}

double serving_pdf_2d(const NetworkParams2D& p, LinkState s, double x, Correlation mode) {
    Ctx ctx(p, mode);
    const double a = big_g_ctx(ctx, s, 0.0);
    if (!(a > 1e-12))
        throw DegenerateCondition("serving_pdf_2d: association probability is zero");
    return kTwoPi * p.lambda * ctx.g(s, x) * x / a;
}

BoundPair g_2d_bounds(const NetworkParams2D& p, LinkState s, double x) {
    p.validate();
    if (!(x >= 0)) throw std::invalid_argument("g_2d_bounds: x must be >= 0");
    const double beta = p.beta();
    const double lam = p.lambda;
    if (!(beta > 0)) {
        const double v = g_2d(p, s, x, Correlation::Independent);
        return {v, v};
    }
    const double b2 = beta * beta;
    if (s == LinkState::Los) {
        const double e1 = excl_e1(p.pathloss, x);
        const double common = -beta * x - lam * kPi * e1 * e1;
        const double upper =
            std::exp(common - kTwoPi * lam / b2 * (f1_factor(beta, e1) - f1_factor(beta, x)));
        const double lower = std::exp(
            common -
            kTwoPi * lam / (3.0 * beta) * (bessel_f_factor(x, beta) - bessel_f_factor(e1, beta)));
        return {lower, upper};
    }
    const double pn = -std::expm1(-beta * x);
    if (!(pn > 0)) return {0.0, 0.0};
    const double e2 = excl_e2(p.pathloss, x);
    const double df1 = f1_factor(beta, e2) - f1_factor(beta, x);  // <= 0 since e2 > x
    const double base = -lam * kPi * x * x;
    // Independent blocking is the lower envelope of g_N; the maximally
    // correlated case (printed with r -> x) is the upper envelope.
    const double ind = pn * std::exp(base + kTwoPi * lam / b2 * df1);
    const double z = 0.5 * beta * x;
    const double ratio = (1.0 - std::exp(-z) * num::bessel_i(0, z)) / pn;
    const double corr = pn * std::exp(base + kTwoPi * lam / b2 * df1 * ratio);
    return {ind, corr};
}

double lt_interference_2d(const NetworkParams2D& p, LinkState v, LinkState u, double r,
                          double nu, Correlation mode) {
    if (!(r >= 0)) throw std::invalid_argument("lt_interference_2d: r must be >= 0");
    if (!(nu >= 0)) throw std::invalid_argument("lt_interference_2d: nu must be >= 0");
    return Ctx(p, mode).kappa(v, u, r, nu);
}

double coverage_2d_branch(const NetworkParams2D& p, LinkState u, double tau,
                          Correlation mode) {
    Ctx ctx(p, mode);
    if (tau <= 0) return big_g_ctx(ctx, u, 0.0);
    return coverage_branch_ctx(ctx, u, tau);
}

double coverage_2d(const NetworkParams2D& p, double tau, Correlation mode) {
    Ctx ctx(p, mode);
    if (tau <= 0)
        return big_g_ctx(ctx, LinkState::Los, 0.0) + big_g_ctx(ctx, LinkState::Nlos, 0.0);
    return coverage_branch_ctx(ctx, LinkState::Los, tau) +
           coverage_branch_ctx(ctx, LinkState::Nlos, tau);
}

BoundPair coverage_2d_bounds(const NetworkParams2D& p, double tau) {
    p.validate();
    if (p.pathloss.kind != PathKind::Lap)
        throw std::invalid_argument("coverage_2d_bounds: LoS-association-only path-loss required");
    const double beta = p.beta();
    const double lam = p.lambda;
    if (tau <= 0) {
        const BoundPair a = assoc_bounds_2d(p);
        return a;
    }
    num::QuadSpec inner = num::inner_quad_spec();
    inner.tail_cutoff_exponent = 40.0;
    const auto kappa_t_integral = [&](double r, double density_scale) {
        const double l_r = ell(p.pathloss, LinkState::Los, r);
        const double nu = tau / l_r;
        return density_scale *
               num::integrate_exp_tail(
                   [&](double t) {
                       return std::exp(-beta * t) *
                              kernel(nu, ell(p.pathloss, LinkState::Los, t)) * t;
                   },
                   r, beta, inner);
    };
    const auto make_pc = [&](auto&& g_of_r, auto&& kappa_expo_of_r) {
        const auto integrand = [&](double r) {
            const double l_r = ell(p.pathloss, LinkState::Los, r);
            const double noise_expo = tau * p.noise_power / l_r;
            if (noise_expo > 700.0) return 0.0;
            return std::exp(-noise_expo - kappa_expo_of_r(r)) * g_of_r(r) * r;
        };
        num::QuadSpec spec;
        spec.rel_tol = 1e-6;
        spec.abs_tol = 1e-9;
        spec.tail_cutoff_exponent = 42.0;
        return kTwoPi * lam * num::integrate_exp_tail(integrand, 0.0, beta, spec);
    };
    const double b2 = beta * beta;
    const double upper = make_pc(
        [&](double r) {
            return std::exp(-beta * r - kTwoPi * lam / b2 * (1.0 - f1_factor(beta, r)));
        },
        [&](double r) { return kappa_t_integral(r, kTwoPi * lam); });
    const double lower = make_pc(
        [&](double r) {
            return std::exp(-beta * r - kTwoPi * lam / (3.0 * beta) * bessel_f_factor(r, beta));
        },
        [&](double r) {
            const double z = 0.5 * beta * r;
            return kappa_t_integral(r, lam) * kTwoPi * std::exp(z) * num::bessel_i(0, z);
        });
    return {lower, upper};
}

BoundPair g_lap_simple_bounds(const NetworkParams2D& p, double r) {
    p.validate();
    if (p.pathloss.kind != PathKind::Lap)
        throw std::invalid_argument("g_lap_simple_bounds: LoS-association-only path-loss required");
    if (!(r >= 0)) throw std::invalid_argument("g_lap_simple_bounds: r must be >= 0");
    const double beta = p.beta();
    const double lam = p.lambda;
    const double m = kSinSquaredSlope;
    const double s = 0.5 * m * kPi;  // > 1 for this slope convention
    const double b2 = beta * beta;
    // Lower: bound sin^2 below by 1 + m(theta - pi/2) inside the maximally
    // correlated void integral and integrate in closed form.
    const double g1 = std::exp(-beta * r -
                               4.0 * lam / (m * b2) *
                                   ((std::exp(beta * r * (s - 1.0)) - 1.0) / (s - 1.0) - 1.0 +
                                    std::exp(-beta * r)));
    // Upper: bound sin^2 above by m theta.
    const double g2 = std::exp(
        -beta * r - 4.0 * lam / (m * m * b2) *
                        (m * beta * r + 2.0 / kPi * std::expm1(-0.5 * m * beta * r * kPi)));
    return {g1, g2};
}

double rate_coverage_2d(const NetworkParams2D& p, const RateAllocation& alloc, double rho,
                        Correlation mode) {
    if (!(rho >= 0)) throw std::invalid_argument("rate_coverage_2d: rho must be >= 0");
    if (alloc.mode == RateAllocation::Mode::EqualAll) {
        const double n_u = alloc.mean_users(p, 1.0);
        const double tau = std::exp2(rho * n_u / p.bandwidth) - 1.0;
        return coverage_2d(p, tau, mode);
    }
    const double a_los = assoc_prob_2d(p, LinkState::Los, mode);
    const double n_lu = alloc.mean_users(p, a_los);
    const double tau = std::exp2(rho * n_lu / p.bandwidth) - 1.0;
    return coverage_2d_branch(p, LinkState::Los, tau, mode);
}

}  // namespace blockcov::twod
