#include "blockcov/oned.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "blockcov/numerics.hpp"

namespace blockcov::oned {

namespace {

// (1 - exp(-mu z)) / mu, continuous at mu -> 0.
double su(double mu, double z) {
    if (!std::isfinite(z)) return mu > 0 ? 1.0 / mu : std::numeric_limits<double>::infinity();
    if (mu * z < 1e-12) return z * (1.0 - 0.5 * mu * z);
    return -std::expm1(-mu * z) / mu;
}

// Interference kernel nu*l / (1 + nu*l); zero when the path-loss vanishes.
double kernel(double nu, double l) {
    if (!(nu > 0) || !(l > 0)) return 0.0;
    const double p = nu * l;
    return p / (1.0 + p);
}

}  // namespace

void NetworkParams1D::validate() const {
    if (!(lambda > 0)) throw std::invalid_argument("NetworkParams1D: lambda must be > 0");
    if (!(mu >= 0)) throw std::invalid_argument("NetworkParams1D: mu must be >= 0");
    if (!(noise_power >= 0)) throw std::invalid_argument("NetworkParams1D: noise_power must be >= 0");
    if (!(bandwidth > 0)) throw std::invalid_argument("NetworkParams1D: bandwidth must be > 0");
    if (!(user_density >= 0)) throw std::invalid_argument("NetworkParams1D: user_density must be >= 0");
}

double g_cond_1d(const NetworkParams1D& p, LinkState s, double x, double q,
                 double q_prime) {
    if (!(x >= 0) || !(q >= 0) || !(q_prime >= 0))
        throw std::invalid_argument("g_cond_1d: x, q, q' must be >= 0");
    const double lam = p.lambda;
    if (s == LinkState::Los) {
        if (x >= q) return 0.0;
        const double e1 = excl_e1(p.pathloss, x);
        if (q_prime <= e1) return std::exp(-lam * (x + e1));
        if (q_prime < x) return std::exp(-lam * (x + q_prime));
        return std::exp(-2.0 * lam * x);
    }
    if (x < q) return 0.0;
    const double e2 = excl_e2(p.pathloss, x);
    if (q_prime < x) return std::exp(-2.0 * lam * x);
    if (q_prime < e2) return std::exp(-lam * (x + q_prime));
    return std::isfinite(e2) ? std::exp(-lam * x) * std::exp(-lam * e2) : 0.0;
}

double g_1d(const NetworkParams1D& p, LinkState s, double x) {
    if (!(x >= 0)) throw std::invalid_argument("g_1d: x must be >= 0");
    const double lam = p.lambda, mu = p.mu, lm = lam + mu;
    if (s == LinkState::Los) {
        const double e1 = excl_e1(p.pathloss, x);
        const double t1 = std::exp(-lam * (e1 + x) - mu * x) * -std::expm1(-mu * e1);
        const double t2 = mu / lm * std::exp(-lm * x) * (std::exp(-lm * e1) - std::exp(-lm * x));
        const double t3 = std::exp(-2.0 * lm * x);
        return t1 + t2 + t3;
    }
    const double e2 = excl_e2(p.pathloss, x);
    const double pn = -std::expm1(-mu * x);
    const double e2f = std::isfinite(e2) ? std::exp(-lm * e2) : 0.0;
    const double t1 = mu / lm * std::exp(-lam * x) * pn * (std::exp(-lm * x) - e2f);
    const double t2 = std::exp(-lam * x) * e2f * pn;
    const double t3 = std::exp(-2.0 * lam * x) * pn * pn;
    return t1 + t2 + t3;
}

double g_1d_bplp(const NetworkParams1D& p, LinkState s, double x) {
    if (p.pathloss.kind != PathKind::Bplp)
        throw std::invalid_argument("g_1d_bplp: requires a BPLP path-loss spec");
    const double lam = p.lambda, mu = p.mu, lm = lam + mu;
    const double alpha = p.pathloss.alpha_ratio, c = p.pathloss.c_ratio;
    if (s == LinkState::Los) {
        if (x > std::pow(c, -1.0 / alpha)) {
            const double cxa = c * std::pow(x, alpha);
            return mu / lm * std::exp(-lm * x) * (std::exp(-lm * cxa) - std::exp(-lm * x)) +
                   std::exp(-lam * (cxa + x)) * std::exp(-mu * x) * -std::expm1(-mu * cxa) +
                   std::exp(-2.0 * lm * x);
        }
        return mu / lm * std::exp(-lm * x) * -std::expm1(-lm * x) + std::exp(-2.0 * lm * x);
    }
    const double e2 = x > 1.0 ? std::pow(x / c, 1.0 / alpha) : std::pow(c, -1.0 / alpha);
    const double pn = -std::expm1(-mu * x);
    return mu * std::exp(-lam * x) / lm * pn * (std::exp(-lm * x) - std::exp(-lm * e2)) +
           std::exp(-lam * x) * std::exp(-lm * e2) * pn +
           std::exp(-2.0 * lam * x) * pn * pn;
}

double g_1d_iba(const NetworkParams1D& p, LinkState s, double x) {
    if (!(x >= 0)) throw std::invalid_argument("g_1d_iba: x must be >= 0");
    const double lam = p.lambda, mu = p.mu;
    if (s == LinkState::Los) {
        const double e1 = excl_e1(p.pathloss, x);
        return std::exp(-mu * x) * std::exp(-2.0 * lam * su(mu, x)) *
               std::exp(2.0 * lam * su(mu, e1)) * std::exp(-2.0 * lam * e1);
    }
    const double e2 = excl_e2(p.pathloss, x);
    return -std::expm1(-mu * x) * std::exp(-2.0 * lam * su(mu, e2)) *
           std::exp(2.0 * lam * su(mu, x)) * std::exp(-2.0 * lam * x);
}

namespace {

double big_g_generic(const NetworkParams1D& p, double r,
                     const std::function<double(double)>& g) {
    num::QuadSpec spec;
    spec.rel_tol = 1e-10;
    spec.abs_tol = 1e-14;
    spec.tail_cutoff_exponent = 36.0;
    return 2.0 * p.lambda * num::integrate_exp_tail(g, r, p.lambda, spec);
}

}  // namespace

double big_g_1d(const NetworkParams1D& p, LinkState s, double r) {
    p.validate();
    if (!(r >= 0)) throw std::invalid_argument("big_g_1d: r must be >= 0");
    return big_g_generic(p, r, [&](double x) { return g_1d(p, s, x); });
}

double assoc_prob_1d(const NetworkParams1D& p, LinkState s) {
    return big_g_1d(p, s, 0.0);
}

double assoc_prob_1d_iba(const NetworkParams1D& p, LinkState s) {
    p.validate();
    return big_g_generic(p, 0.0, [&](double x) { return g_1d_iba(p, s, x); });
}

namespace {

// Cumulative integral table for a smooth nonnegative kernel on [lo, inf):
// geometric panels until two consecutive ones drop below the tail tolerance.
// tail_from(a) = total - cum_to(a) with one extra panel-local quadrature per
// query, so queries inherit quadrature-grade accuracy.
class TailTable {
  public:
    TailTable() = default;

    void build(std::function<double(double)> f, double lo, double abs_tail_tol) {
        f_ = std::move(f);
        nodes_.assign(1, lo);
        prefix_.assign(1, 0.0);
        num::QuadSpec spec = num::inner_quad_spec();
        spec.rel_tol = 1e-9;
        double width = 1.0;
        int quiet = 0;
        for (int k = 0; k < 200 && quiet < 2; ++k) {
            const double a = nodes_.back();
            const double piece = num::integrate(f_, a, a + width, spec);
            nodes_.push_back(a + width);
            prefix_.push_back(prefix_.back() + piece);
            quiet = (std::fabs(piece) < abs_tail_tol / 4.0) ? quiet + 1 : 0;
            width *= 1.7;
        }
        total_ = prefix_.back();
    }

    bool empty() const { return nodes_.empty(); }

    double cum_to(double a) const {
        if (a <= nodes_.front()) return 0.0;
        if (a >= nodes_.back()) return total_;
        const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), a);
        const std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        num::QuadSpec spec = num::inner_quad_spec();
        spec.rel_tol = 1e-9;
        return prefix_[k] + num::integrate(f_, nodes_[k], a, spec);
    }

    double tail_from(double a) const { return total_ - cum_to(a); }
    double total() const { return total_; }

  private:
    std::function<double(double)> f_;
    std::vector<double> nodes_;
    std::vector<double> prefix_;
    double total_ = 0.0;
};

// Shared machinery for one serving distance x at threshold tau: the
// interference-kernel cumulatives that the (q, q') integrals query.
struct CoverageKernels {
    const NetworkParams1D& p;
    double tau;
    double x;
    double e1 = 0.0, e2 = 0.0;
    double nu_l = 0.0, nu_n = 0.0;
    TailTable fn_los_serving;   // kernel(nu_l, ell_N(y)) from e1(x)
    TailTable gl_los_serving;   // kernel(nu_l, ell_L(y)) from x
    TailTable fn_nlos_serving;  // kernel(nu_n, ell_N(y)) from x
    TailTable gl_nlos_serving;  // kernel(nu_n, ell_L(y)) from e2(x)
    bool nlos_possible = false;

    CoverageKernels(const NetworkParams1D& params, double tau_lin, double xx,
                    bool build_los = true, bool build_nlos = true)
        : p(params), tau(tau_lin), x(xx) {
        const double tail_tol = 1e-9 / std::max(p.lambda, 1e-12);
        e1 = excl_e1(p.pathloss, x);
        e2 = excl_e2(p.pathloss, x);
        const double l_los = ell(p.pathloss, LinkState::Los, x);
        const double l_nlos = ell(p.pathloss, LinkState::Nlos, x);
        nu_l = (build_los && l_los > 0) ? tau / l_los : 0.0;
        if (nu_l > 0) {
            fn_los_serving.build(
                [this](double y) { return kernel(nu_l, ell(p.pathloss, LinkState::Nlos, y)); },
                e1, tail_tol);
            gl_los_serving.build(
                [this](double y) { return kernel(nu_l, ell(p.pathloss, LinkState::Los, y)); },
                x, tail_tol);
        }
        nlos_possible = build_nlos && l_nlos > 0;
        if (nlos_possible) {
            nu_n = tau / l_nlos;
            fn_nlos_serving.build(
                [this](double y) { return kernel(nu_n, ell(p.pathloss, LinkState::Nlos, y)); },
                x, tail_tol);
            if (std::isfinite(e2))
                gl_nlos_serving.build(
                    [this](double y) { return kernel(nu_n, ell(p.pathloss, LinkState::Los, y)); },
                    e2, tail_tol);
        }
    }
};

// int_x^inf mu e^(-mu q) exp(-lambda (FN_tail(q) + int_x^q fL)) dq; shared by
// the q integral of the LoS branch and the q' > x piece of its q' integral.
double los_q_integral(const CoverageKernels& k) {
    const NetworkParams1D& p = k.p;
    const auto integrand = [&](double q) {
        const double expo = k.fn_los_serving.tail_from(q) +
                            (k.gl_los_serving.cum_to(q));
        return p.mu * std::exp(-p.mu * q - p.lambda * expo);
    };
    num::QuadSpec spec = num::inner_quad_spec();
    spec.tail_cutoff_exponent = 34.0;
    return num::integrate_exp_tail(integrand, k.x, p.mu, spec);
}

double coverage_branch_los(const CoverageKernels& k) {
    if (!(k.nu_l > 0)) return 0.0;
    const NetworkParams1D& p = k.p;
    const double lam = p.lambda, mu = p.mu, x = k.x, e1 = k.e1;
    const double q_part = los_q_integral(k);

    // q' in (0, e1]: exclusion radius caps both the LoS void and the NLoS
    // interferer horizon.
    const double fn_at_e1 = k.fn_los_serving.tail_from(e1);
    double qp_part = std::exp(-lam * (x + e1) - lam * fn_at_e1) * -std::expm1(-mu * e1);

    // q' in (e1, x).
    if (x > e1) {
        const auto mid = [&](double qp) {
            return mu * std::exp(-(mu + lam) * qp - lam * k.fn_los_serving.tail_from(qp));
        };
        num::QuadSpec spec = num::inner_quad_spec();
        qp_part += std::exp(-lam * x) * num::integrate(mid, e1, x, spec);
    }

    // q' in (x, inf): same integral as the q part.
    qp_part += std::exp(-2.0 * lam * x) * q_part;

    const double l_los = ell(p.pathloss, LinkState::Los, x);
    const double noise = l_los > 0 ? std::exp(-k.tau * p.noise_power / l_los) : 0.0;
    return noise * q_part * qp_part;
}

double coverage_branch_nlos(const CoverageKernels& k) {
    if (!k.nlos_possible) return 0.0;
    const NetworkParams1D& p = k.p;
    const double lam = p.lambda, mu = p.mu, x = k.x, e2 = k.e2;
    const double pn = -std::expm1(-mu * x);
    if (pn <= 0) return 0.0;

    const double fn_at_x = k.fn_nlos_serving.tail_from(x);
    double qp_part = std::exp(-2.0 * lam * x - lam * fn_at_x) * pn;

    const double hi = std::isfinite(e2) ? e2 : std::numeric_limits<double>::infinity();
    const auto mid = [&](double qp) {
        return mu * std::exp(-(mu + lam) * qp - lam * k.fn_nlos_serving.tail_from(qp));
    };
    num::QuadSpec spec = num::inner_quad_spec();
    spec.tail_cutoff_exponent = 34.0;
    if (std::isfinite(hi)) {
        if (hi > x) qp_part += std::exp(-lam * x) * num::integrate(mid, x, hi, spec);
        const auto far = [&](double qp) {
            const double expo = k.fn_nlos_serving.tail_from(qp) +
                                k.gl_nlos_serving.cum_to(qp);
            return mu * std::exp(-mu * qp - lam * expo);
        };
        qp_part += std::exp(-lam * (x + e2)) *
                   num::integrate_exp_tail(far, e2, mu, spec);
    } else {
        qp_part += std::exp(-lam * x) * num::integrate_exp_tail(mid, x, mu, spec);
    }

    const double l_nlos = ell(p.pathloss, LinkState::Nlos, x);
    const double noise = std::exp(-k.tau * p.noise_power / l_nlos);
    return noise * pn * std::exp(-lam * fn_at_x) * qp_part;
}

}  // namespace

double lt_interference_cond_1d(const NetworkParams1D& p, LinkState s, double x,
                               double q, double q_prime, double lt_arg) {
    p.validate();
    if (!(lt_arg >= 0)) throw std::invalid_argument("lt_interference_cond_1d: s must be >= 0");
    if (s == LinkState::Los && !(x < q))
        throw std::invalid_argument("lt_interference_cond_1d: LoS serving requires x < q");
    if (s == LinkState::Nlos && !(x >= q))
        throw std::invalid_argument("lt_interference_cond_1d: NLoS serving requires x >= q");
    if (lt_arg == 0) return 1.0;

    num::QuadSpec spec;
    spec.rel_tol = 1e-9;
    spec.abs_tol = 1e-13;
    const auto frac_n = [&](double y) {
        return kernel(lt_arg, ell(p.pathloss, LinkState::Nlos, y));
    };
    const auto frac_l = [&](double y) {
        return kernel(lt_arg, ell(p.pathloss, LinkState::Los, y));
    };
    const bool nlos_live = ell(p.pathloss, LinkState::Nlos, std::max(x, 1.0)) > 0 ||
                           ell(p.pathloss, LinkState::Nlos, 0.0) > 0;

    double expo = 0.0;
    if (s == LinkState::Los) {
        const double e1 = excl_e1(p.pathloss, x);
        if (nlos_live) {
            expo += num::integrate_poly_tail(frac_n, q, spec);
            expo += num::integrate_poly_tail(frac_n, std::max(e1, q_prime), spec);
        }
        if (q > x) expo += num::integrate(frac_l, x, q, spec);
        if (q_prime > x) expo += num::integrate(frac_l, x, q_prime, spec);
    } else {
        if (nlos_live) {
            expo += num::integrate_poly_tail(frac_n, x, spec);
            expo += num::integrate_poly_tail(frac_n, std::max(x, q_prime), spec);
        }
        const double e2 = excl_e2(p.pathloss, x);
        if (std::isfinite(e2) && q_prime > e2) expo += num::integrate(frac_l, e2, q_prime, spec);
    }
    return std::exp(-p.lambda * expo);
}

double coverage_1d(const NetworkParams1D& p, double tau) {
    p.validate();
    if (tau <= 0)
        return assoc_prob_1d(p, LinkState::Los) + assoc_prob_1d(p, LinkState::Nlos);

    const auto integrand = [&](double x) {
        const double l_los = ell(p.pathloss, LinkState::Los, x);
        const double l_nlos = ell(p.pathloss, LinkState::Nlos, x);
        const bool live_los = l_los > 0 && tau * p.noise_power / l_los < 700.0;
        const bool live_nlos = l_nlos > 0 && tau * p.noise_power / l_nlos < 700.0;
        if (!live_los && !live_nlos) return 0.0;
        CoverageKernels k(p, tau, x, live_los, live_nlos);
        return coverage_branch_los(k) + coverage_branch_nlos(k);
    };
    num::QuadSpec spec;
    spec.rel_tol = 1e-6;
    spec.abs_tol = 1e-10;
    spec.tail_cutoff_exponent = 34.0;
    return 2.0 * p.lambda * num::integrate_exp_tail(integrand, 0.0, p.lambda, spec);
}

double coverage_1d_iba(const NetworkParams1D& p, double tau) {
    p.validate();
    if (tau <= 0)
        return assoc_prob_1d_iba(p, LinkState::Los) + assoc_prob_1d_iba(p, LinkState::Nlos);

    num::QuadSpec inner = num::inner_quad_spec();
    inner.tail_cutoff_exponent = 34.0;
    const auto lt_iba = [&](LinkState s, double x, double nu) {
        const double el = s == LinkState::Los ? x : excl_e2(p.pathloss, x);
        const double en = s == LinkState::Los ? excl_e1(p.pathloss, x) : x;
        double expo = 0.0;
        if (std::isfinite(el)) {
            const auto f_los = [&](double y) {
                return kernel(nu, ell(p.pathloss, LinkState::Los, y)) * std::exp(-p.mu * y);
            };
            expo += num::integrate_exp_tail(f_los, el, p.mu, inner);
        }
        if (ell(p.pathloss, LinkState::Nlos, std::max(x, 1.0)) > 0) {
            const auto f_nlos = [&](double y) {
                return kernel(nu, ell(p.pathloss, LinkState::Nlos, y)) * -std::expm1(-p.mu * y);
            };
            expo += num::integrate_poly_tail(f_nlos, en, inner);
        }
        return std::exp(-2.0 * p.lambda * expo);
    };

    const auto integrand = [&](double x) {
        double total = 0.0;
        for (LinkState s : {LinkState::Los, LinkState::Nlos}) {
            const double l = ell(p.pathloss, s, x);
            if (!(l > 0)) continue;
            total += std::exp(-tau * p.noise_power / l) * lt_iba(s, x, tau / l) *
                     g_1d_iba(p, s, x);
        }
        return total;
    };
    num::QuadSpec spec;
    spec.rel_tol = 1e-6;
    spec.abs_tol = 1e-10;
    spec.tail_cutoff_exponent = 34.0;
    return 2.0 * p.lambda * num::integrate_exp_tail(integrand, 0.0, p.lambda, spec);
}

}  // namespace blockcov::oned
