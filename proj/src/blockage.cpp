#include "blockcov/blockage.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "blockcov/numerics.hpp"
#include "geom_detail.hpp"

namespace blockcov {

namespace {
constexpr double kPi = M_PI;
constexpr double kThetaEps = 1e-9;
}  // namespace

LengthDist LengthDist::uniform(double l_max) {
    if (!(l_max > 0)) throw std::invalid_argument("LengthDist: L_max must be > 0");
    return {Kind::Uniform, l_max};
}

LengthDist LengthDist::deterministic(double l) {
    if (!(l > 0)) throw std::invalid_argument("LengthDist: length must be > 0");
    return {Kind::Deterministic, l};
}

double LengthDist::mean() const {
    return kind == Kind::Uniform ? 0.5 * param : param;
}

OrientationDist OrientationDist::deterministic(double delta) {
    if (!(delta >= 0) || !(delta < kPi))
        throw std::invalid_argument("OrientationDist: delta must lie in [0, pi)");
    return {Kind::Deterministic, delta};
}

double OrientationDist::mean_sin() const {
    return is_uniform() ? 2.0 / kPi : std::sin(value);
}

void BlockageModel::validate() const {
    if (!(mu >= 0)) throw std::invalid_argument("BlockageModel: mu must be >= 0");
    if (!(length.param > 0)) throw std::invalid_argument("BlockageModel: length scale must be > 0");
}

double BlockageModel::beta() const { return 2.0 * mu * length.mean() / kPi; }

double los_prob(const BlockageModel& model, double r) {
    if (!(r >= 0)) throw std::invalid_argument("los_prob: r must be >= 0");
    return std::exp(-model.beta() * r);
}

// The blocking region of a single link is the parallelogram spanned by the
// link and the blockage segment; for two links sharing the user endpoint the
// two parallelograms share the blockage-direction edge through the user.
// Their overlap (empty unless delta > theta) is the triangle between the two
// link directions cut by the far edges of both parallelograms. The cuts run
// parallel to the shared edge and the far-edge cuts reach the apex at
// fractions f1 = r1 sin(theta) / (l sin(delta)) and
// f2 = r2 sin(theta) / (l sin(delta-theta)), so the truncated area is
// C * (1 - (1 - u)^2) with u = min(1, f1, f2).
double parallelogram_union_area(double r1, double r2, double theta, double l, double delta) {
    if (l <= 0) return 0.0;
    if (!(r1 > 0) || !(r2 > 0)) return 0.0;
    if (theta < 0 || theta > kPi || delta < 0 || delta > kPi)
        throw std::invalid_argument("parallelogram_union_area: angles must lie in [0, pi]");

    const double sin_d = std::sin(delta);
    if (theta < kThetaEps) return l * sin_d * std::max(r1, r2);

    const double sin_t = std::sin(theta);
    const double sin_dt = std::sin(std::fabs(delta - theta));
    double area = l * r1 * sin_dt + l * r2 * sin_d;
    if (delta > theta && sin_d > 0 && sin_dt > 0) {
        const double full = l * l * sin_d * sin_dt / (2.0 * sin_t);
        const double f1 = r1 * sin_t / (l * sin_d);
        const double f2 = r2 * sin_t / (l * sin_dt);
        const double u = std::min({1.0, f1, f2});
        area -= full * u * (2.0 - u);
    }
    return area;
}

namespace {

double integrate_over_orientation(const std::function<double(double)>& f, double lo,
                                  double hi, const std::vector<double>& breakpoints) {
    num::QuadSpec spec;
    spec.rel_tol = 1e-10;
    spec.abs_tol = 1e-14;
    double total = 0.0;
    double a = lo;
    for (double b : breakpoints) {
        if (b <= a || b >= hi) continue;
        total += num::integrate(f, a, b, spec);
        a = b;
    }
    total += num::integrate(f, a, hi, spec);
    return total;
}

}  // namespace

double f_prime(const BlockageModel& model, double r1, double r2, double theta) {
    model.validate();
    if (!(r1 > 0) || !(r2 > 0)) return 0.0;
    if (!(theta >= 0) || !(theta <= kPi))
        throw std::invalid_argument("f_prime: theta must lie in [0, pi]");
    if (theta >= kPi) return 0.0;
    if (theta < kThetaEps)
        return model.length.mean() * model.orientation.mean_sin() * std::min(r1, r2);

    if (model.orientation.kind == OrientationDist::Kind::Deterministic) {
        const double d = model.orientation.value;
        return d > theta ? geom::overlap_correction_at(model, r1, r2, theta, d) : 0.0;
    }
    const auto breaks = geom::correction_breakpoints(model, r1, r2, theta);
    const auto f = [&](double d) {
        return geom::overlap_correction_at(model, r1, r2, theta, d);
    };
    return integrate_over_orientation(f, theta, kPi, breaks) / kPi;
}

double curly_n(const BlockageModel& model, double r1, double r2, double theta) {
    model.validate();
    if (model.orientation.is_uniform()) {
        const double beta_over_mu = 2.0 * model.length.mean() / kPi;
        return beta_over_mu * (r1 + r2) - f_prime(model, r1, r2, theta);
    }
    return curly_n_area(model, r1, r2, theta);
}

double curly_n_area(const BlockageModel& model, double r1, double r2, double theta) {
    model.validate();
    const double mean_len = model.length.mean();
    if (!(r1 > 0) || !(r2 > 0)) {
        const double r = std::max(std::max(r1, 0.0), std::max(r2, 0.0));
        return mean_len * model.orientation.mean_sin() * r;
    }
    if (theta < kThetaEps)
        return mean_len * model.orientation.mean_sin() * std::max(r1, r2);

    // Mean union area at one orientation, averaged over the length law.
    const auto area_mean_len = [&](double d) {
        const double base =
            mean_len * (r1 * std::sin(std::fabs(d - theta)) + r2 * std::sin(d));
        if (d <= theta) return base;
        return base - geom::overlap_correction_at(model, r1, r2, theta, d);
    };
    if (model.orientation.kind == OrientationDist::Kind::Deterministic)
        return area_mean_len(model.orientation.value);

    auto breaks = geom::correction_breakpoints(model, r1, r2, theta);
    breaks.insert(std::lower_bound(breaks.begin(), breaks.end(), theta), theta);
    return integrate_over_orientation(area_mean_len, 0.0, kPi, breaks) / kPi;
}

double joint_prob(const BlockageModel& model, LinkState s1, LinkState s2, double r1,
                  double r2, double theta) {
    const double beta = model.beta();
    const double mu_n = model.mu * curly_n(model, r1, r2, theta);
    const double p_ll = std::exp(-mu_n);
    const double p_l1 = std::exp(-beta * r1);
    const double p_l2 = std::exp(-beta * r2);

    double p;
    if (s1 == LinkState::Los && s2 == LinkState::Los)
        p = p_ll;
    else if (s1 == LinkState::Los)
        p = p_l1 - p_ll;
    else if (s2 == LinkState::Los)
        p = p_l2 - p_ll;
    else
        p = 1.0 - p_l1 - p_l2 + p_ll;

    if (p < -1e-9)
        throw InvalidGeometry("joint_prob: negative probability " + std::to_string(p));
    return std::clamp(p, 0.0, 1.0);
}

std::pair<double, double> joint_prob_bounds(const BlockageModel& model, double r1,
                                            double r2, double theta) {
    const double beta = model.beta();
    const double lower = std::exp(-beta * (r1 + r2));
    const double upper =
        std::exp(-beta * (r1 + r2) + 0.5 * beta * std::min(r1, r2) * (1.0 + std::cos(theta)));
    return {lower, upper};
}

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segment_blocks_link(const Segment& seg, Vec2 bs, Vec2 user) {
    const double hx = 0.5 * seg.length * std::cos(seg.orientation);
    const double hy = 0.5 * seg.length * std::sin(seg.orientation);
    const Vec2 p3{seg.center.x - hx, seg.center.y - hy};
    const Vec2 p4{seg.center.x + hx, seg.center.y + hy};

    const double d1 = cross(p3, p4, user);
    const double d2 = cross(p3, p4, bs);
    const double d3 = cross(user, bs, p3);
    const double d4 = cross(user, bs, p4);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(p3, p4, user)) return true;
    if (d2 == 0 && on_segment(p3, p4, bs)) return true;
    if (d3 == 0 && on_segment(user, bs, p3)) return true;
    if (d4 == 0 && on_segment(user, bs, p4)) return true;
    return false;
}

}  // namespace blockcov
