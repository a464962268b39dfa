#include "blockcov/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"

namespace blockcov::sim {

namespace {
constexpr double kPi = M_PI;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (0xA0761D6478BD642FULL * (stream + 1));
    for (auto& w : s_) w = splitmix64(state);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::exponential() { return -std::log1p(-uniform()); }

std::int64_t Rng::poisson(double mean) {
    if (!(mean > 0)) return 0;
    double acc = exponential();
    std::int64_t n = 0;
    while (acc <= mean) {
        acc += exponential();
        ++n;
    }
    return n;
}

void SimConfig::validate() const {
    if (dimension != 1 && dimension != 2)
        throw std::invalid_argument("SimConfig: dimension must be 1 or 2");
    if (n_scenes < 1) throw std::invalid_argument("SimConfig: n_scenes must be >= 1");
    if (dimension == 1) {
        params1.validate();
        if (!(window_radius >= 10.0 / params1.lambda))
            throw std::invalid_argument("SimConfig: window_radius below 10x mean BS spacing");
    } else {
        params2.validate();
        if (!(window_radius >= 10.0 / std::sqrt(params2.lambda)))
            throw std::invalid_argument("SimConfig: window_radius below 10x mean BS spacing");
        if (!(guard_radius >= params2.blockage.length.max_value()))
            throw std::invalid_argument("SimConfig: guard_radius below max blockage length");
    }
}

const PathLossSpec& SimConfig::pathloss() const {
    return dimension == 1 ? params1.pathloss : params2.pathloss;
}

double SimConfig::noise_power() const {
    return dimension == 1 ? params1.noise_power : params2.noise_power;
}

namespace {

double sample_length(const LengthDist& d, Rng& rng) {
    return d.kind == LengthDist::Kind::Uniform ? rng.uniform(0.0, d.param) : d.param;
}

double sample_orientation(const OrientationDist& d, Rng& rng) {
    return d.is_uniform() ? rng.uniform(0.0, kPi) : d.value;
}

std::vector<Segment> generate_blockages_2d(const twod::NetworkParams2D& p, double radius,
                                           Rng& rng) {
    const std::int64_t n_blk = rng.poisson(p.blockage.mu * kPi * radius * radius);
    std::vector<Segment> out;
    out.reserve(n_blk);
    for (std::int64_t i = 0; i < n_blk; ++i) {
        const double r = radius * std::sqrt(rng.uniform());
        const double a = rng.uniform(0.0, 2.0 * kPi);
        Segment s;
        s.center = {r * std::cos(a), r * std::sin(a)};
        s.length = sample_length(p.blockage.length, rng);
        s.orientation = sample_orientation(p.blockage.orientation, rng);
        out.push_back(s);
    }
    return out;
}

// Angular-bin index over blockage segments, as seen from the origin: a
// segment can only cross a link whose direction falls inside the segment's
// subtended angle and whose BS is no closer than the segment.
class SectorIndex {
  public:
    explicit SectorIndex(const std::vector<Segment>& segs) : segs_(segs) {
        counts_.assign(kBins + 1, 0);
        std::vector<std::pair<int, int>> spans(segs.size());
        std::vector<double> mind(segs.size());
        for (std::size_t i = 0; i < segs.size(); ++i) {
            spans[i] = subtended_bins(segs[i], mind[i]);
            for (int b = spans[i].first; b <= spans[i].second; ++b) ++counts_[wrap(b) + 1];
        }
        for (int b = 0; b < kBins; ++b) counts_[b + 1] += counts_[b];
        entries_.resize(counts_[kBins]);
        std::vector<int> cursor(counts_.begin(), counts_.end() - 1);
        for (std::size_t i = 0; i < segs.size(); ++i) {
            for (int b = spans[i].first; b <= spans[i].second; ++b) {
                entries_[cursor[wrap(b)]++] = {static_cast<int>(i), mind[i]};
            }
        }
    }

    // True iff any indexed segment crosses the open link from the origin to bs.
    bool blocked(Vec2 bs) const {
        const double dist = std::hypot(bs.x, bs.y);
        const int b = bin_of(std::atan2(bs.y, bs.x));
        const Vec2 user{0.0, 0.0};
        for (int e = counts_[b]; e < counts_[b + 1]; ++e) {
            const Entry& en = entries_[e];
            if (en.min_dist > dist) continue;
            if (segment_blocks_link(segs_[en.seg], bs, user)) return true;
        }
        return false;
    }

  private:
    struct Entry {
        int seg;
        double min_dist;
    };
    static constexpr int kBins = 1024;

    static int wrap(int b) { return ((b % kBins) + kBins) % kBins; }

    static int bin_of(double angle) {
        int b = static_cast<int>(std::floor((angle + kPi) / (2.0 * kPi) * kBins));
        return std::clamp(b, 0, kBins - 1);
    }

    std::pair<int, int> subtended_bins(const Segment& s, double& min_dist) const {
        const double hx = 0.5 * s.length * std::cos(s.orientation);
        const double hy = 0.5 * s.length * std::sin(s.orientation);
        const Vec2 a{s.center.x - hx, s.center.y - hy};
        const Vec2 b{s.center.x + hx, s.center.y + hy};
        min_dist = point_segment_distance(a, b);
        if (min_dist <= 1e-9) return {0, kBins - 1};  // segment through the origin
        const double ang_a = std::atan2(a.y, a.x);
        const double ang_b = std::atan2(b.y, b.x);
        double lo = ang_a, hi = ang_b;
        if (lo > hi) std::swap(lo, hi);
        if (hi - lo > kPi) {
            // Interval crosses the +-pi cut; take the complement span.
            return {bin_of_unclamped(hi), bin_of_unclamped(lo + 2.0 * kPi)};
        }
        return {bin_of_unclamped(lo), bin_of_unclamped(hi)};
    }

    static int bin_of_unclamped(double angle) {
        return static_cast<int>(std::floor((angle + kPi) / (2.0 * kPi) * kBins));
    }

    static double point_segment_distance(Vec2 a, Vec2 b) {
        const double vx = b.x - a.x, vy = b.y - a.y;
        const double len2 = vx * vx + vy * vy;
        double t = len2 > 0 ? -(a.x * vx + a.y * vy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double px = a.x + t * vx, py = a.y + t * vy;
        return std::hypot(px, py);
    }

    const std::vector<Segment>& segs_;
    std::vector<int> counts_;
    std::vector<Entry> entries_;
};

}  // namespace

SimScene generate_scene(const SimConfig& cfg, std::int64_t scene_index) {
    Rng rng(cfg.rng_seed, static_cast<std::uint64_t>(scene_index));
    SimScene scene;
    if (cfg.dimension == 1) {
        const auto& p = cfg.params1;
        const double w = cfg.window_radius;
        const double wb = w + cfg.guard_radius;
        const std::int64_t n_bs = rng.poisson(p.lambda * 2.0 * w);
        scene.bs_points.reserve(n_bs);
        for (std::int64_t i = 0; i < n_bs; ++i)
            scene.bs_points.push_back({rng.uniform(-w, w), 0.0});
        const std::int64_t n_blk = rng.poisson(p.mu * 2.0 * wb);
        scene.blockage_points.reserve(n_blk);
        for (std::int64_t i = 0; i < n_blk; ++i)
            scene.blockage_points.push_back(rng.uniform(-wb, wb));
        double q_right = std::numeric_limits<double>::infinity();
        double q_left = std::numeric_limits<double>::infinity();
        for (double b : scene.blockage_points) {
            if (b > 0)
                q_right = std::min(q_right, b);
            else
                q_left = std::min(q_left, -b);
        }
        scene.los_flags.resize(scene.bs_points.size());
        scene.fading.resize(scene.bs_points.size());
        for (std::size_t i = 0; i < scene.bs_points.size(); ++i) {
            const double x = scene.bs_points[i].x;
            bool los;
            if (cfg.independent_blocking)
                los = rng.uniform() < std::exp(-p.mu * std::fabs(x));
            else
                los = std::fabs(x) < (x > 0 ? q_right : q_left);
            scene.los_flags[i] = los ? 1 : 0;
            scene.fading[i] = rng.exponential();
        }
        return scene;
    }

    const auto& p = cfg.params2;
    const double w = cfg.window_radius;
    const double wb = w + cfg.guard_radius;
    const std::int64_t n_bs = rng.poisson(p.lambda * kPi * w * w);
    scene.bs_points.reserve(n_bs);
    for (std::int64_t i = 0; i < n_bs; ++i) {
        const double r = w * std::sqrt(rng.uniform());
        const double a = rng.uniform(0.0, 2.0 * kPi);
        scene.bs_points.push_back({r * std::cos(a), r * std::sin(a)});
    }
    scene.blockages = generate_blockages_2d(p, wb, rng);
    scene.los_flags.resize(scene.bs_points.size());
    scene.fading.resize(scene.bs_points.size());
    if (cfg.independent_blocking) {
        const double beta = p.blockage.beta();
        for (std::size_t i = 0; i < scene.bs_points.size(); ++i) {
            const double d = std::hypot(scene.bs_points[i].x, scene.bs_points[i].y);
            scene.los_flags[i] = rng.uniform() < std::exp(-beta * d) ? 1 : 0;
            scene.fading[i] = rng.exponential();
        }
    } else {
        const SectorIndex index(scene.blockages);
        for (std::size_t i = 0; i < scene.bs_points.size(); ++i) {
            scene.los_flags[i] = index.blocked(scene.bs_points[i]) ? 0 : 1;
            scene.fading[i] = rng.exponential();
        }
    }
    return scene;
}

std::optional<SinrSample> resolve_sinr(SimScene& scene, const SimConfig& cfg) {
    const PathLossSpec& pl = cfg.pathloss();
    const std::size_t n = scene.bs_points.size();
    if (n == 0) return std::nullopt;

    std::size_t best = n;
    double best_power = 0.0, best_dist = 0.0;
    std::vector<double> avg_power(n), dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = std::hypot(scene.bs_points[i].x, scene.bs_points[i].y);
        const LinkState s = scene.los_flags[i] ? LinkState::Los : LinkState::Nlos;
        avg_power[i] = ell(pl, s, dist[i]);
        const bool better =
            best == n ? avg_power[i] > 0.0
                      : (avg_power[i] > best_power ||
                         (avg_power[i] == best_power &&
                          (dist[i] < best_dist || (dist[i] == best_dist && i < best))));
        if (better && avg_power[i] > 0.0) {
            best = i;
            best_power = avg_power[i];
            best_dist = dist[i];
        }
    }
    if (best == n) {
        scene.serving_index.reset();
        return std::nullopt;
    }

    scene.serving_index = best;
    SinrSample out;
    out.serving_index = best;
    out.serving_state = scene.los_flags[best] ? LinkState::Los : LinkState::Nlos;
    out.serving_distance = best_dist;
    double interference_los = 0.0, interference_nlos = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == best) continue;
        const double p = scene.fading[i] * avg_power[i];
        if (scene.los_flags[i])
            interference_los += p;
        else
            interference_nlos += p;
    }
    out.interference_los = interference_los;
    out.interference_nlos = interference_nlos;
    const double s_pow = scene.fading[best] * best_power;
    out.sinr = s_pow / (cfg.noise_power() + interference_los + interference_nlos);
    return out;
}

namespace {

EstimateWithCI reduce_indicator(const std::vector<std::uint8_t>& hits) {
    const std::int64_t n = static_cast<std::int64_t>(hits.size());
    std::int64_t c = 0;
    for (std::uint8_t h : hits) c += h;
    const double mean = n > 0 ? static_cast<double>(c) / n : 0.0;
    const double se = n > 0 ? std::sqrt(std::max(mean * (1.0 - mean), 0.0) / n) : 0.0;
    return {mean, se, n};
}

// Runs resolve_sinr over all scenes, storing per-scene samples in index
// order (NoServer kept as nullopt so callers apply their own semantics).
std::vector<std::optional<SinrSample>> run_sinr_scenes(const SimConfig& cfg) {
    cfg.validate();
    std::vector<std::optional<SinrSample>> out(cfg.n_scenes);
    par::parallel_for(cfg.n_scenes, [&](std::int64_t i) {
        SimScene scene = generate_scene(cfg, i);
        out[i] = resolve_sinr(scene, cfg);
    });
    return out;
}

}  // namespace

std::vector<EstimateWithCI> estimate_curve(const SimConfig& cfg, const CoverageMetric& m) {
    const auto samples = run_sinr_scenes(cfg);
    std::vector<EstimateWithCI> out;
    out.reserve(m.tau_grid.size());
    for (double tau : m.tau_grid) {
        std::vector<std::uint8_t> hits(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            hits[i] = samples[i] && samples[i]->sinr > tau ? 1 : 0;
        out.push_back(reduce_indicator(hits));
    }
    return out;
}

std::vector<EstimateWithCI> estimate_curve(const SimConfig& cfg, const RateCoverageMetric& m) {
    if (cfg.dimension != 2)
        throw std::invalid_argument("rate coverage estimation is defined for 2D configs");
    const auto samples = run_sinr_scenes(cfg);
    double a_los = 0.0;
    for (const auto& s : samples)
        if (s && s->serving_state == LinkState::Los) a_los += 1.0;
    a_los /= static_cast<double>(samples.size());

    const bool los_only = m.alloc.mode == twod::RateAllocation::Mode::LosOnly;
    const double n_users = m.alloc.mean_users(cfg.params2, a_los);
    std::vector<EstimateWithCI> out;
    out.reserve(m.rho_grid.size());
    for (double rho : m.rho_grid) {
        const double tau = std::exp2(rho * n_users / cfg.params2.bandwidth) - 1.0;
        std::vector<std::uint8_t> hits(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            const bool served = s && (!los_only || s->serving_state == LinkState::Los);
            hits[i] = served && s->sinr > tau ? 1 : 0;
        }
        out.push_back(reduce_indicator(hits));
    }
    return out;
}

std::vector<EstimateWithCI> estimate_curve(const SimConfig& cfg, const BigGMetric& m) {
    const auto samples = run_sinr_scenes(cfg);
    std::vector<EstimateWithCI> out;
    out.reserve(m.r_grid.size());
    for (double r : m.r_grid) {
        std::vector<std::uint8_t> hits(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            hits[i] = samples[i] && samples[i]->serving_state == m.state &&
                              samples[i]->serving_distance > r
                          ? 1
                          : 0;
        out.push_back(reduce_indicator(hits));
    }
    return out;
}

EstimateWithCI estimate_assoc(const SimConfig& cfg, LinkState state) {
    BigGMetric m;
    m.state = state;
    m.r_grid = {0.0};
    return estimate_curve(cfg, m)[0];
}

// Blockage-only estimator: BSs play no role in the joint LoS probability, so
// scenes here carry just the segment process over window + guard.
std::vector<EstimateWithCI> estimate_curve(const SimConfig& cfg, const JointLosMetric& m) {
    if (cfg.dimension != 2)
        throw std::invalid_argument("joint LoS estimation is defined for 2D configs");
    if (!(cfg.guard_radius >= cfg.params2.blockage.length.max_value()))
        throw std::invalid_argument("joint LoS estimation: guard_radius below max blockage length");
    for (const auto& pt : m.grid)
        if (std::max(pt.r1, pt.r2) > cfg.window_radius)
            throw std::invalid_argument("joint LoS estimation: link outside the window");

    const std::size_t k = m.grid.size();
    std::vector<std::uint8_t> hits(static_cast<std::size_t>(cfg.n_scenes) * k);
    par::parallel_for(cfg.n_scenes, [&](std::int64_t i) {
        Rng rng(cfg.rng_seed, static_cast<std::uint64_t>(i));
        const std::vector<Segment> blockages = generate_blockages_2d(
            cfg.params2, cfg.window_radius + cfg.guard_radius, rng);
        const SectorIndex index(blockages);
        for (std::size_t g = 0; g < k; ++g) {
            const auto& pt = m.grid[g];
            const Vec2 bs1{pt.r1, 0.0};
            const Vec2 bs2{pt.r2 * std::cos(pt.theta), pt.r2 * std::sin(pt.theta)};
            const bool both = !index.blocked(bs1) && !index.blocked(bs2);
            hits[static_cast<std::size_t>(i) * k + g] = both ? 1 : 0;
        }
    });
    std::vector<EstimateWithCI> out;
    out.reserve(k);
    for (std::size_t g = 0; g < k; ++g) {
        std::vector<std::uint8_t> col(cfg.n_scenes);
        for (std::int64_t i = 0; i < cfg.n_scenes; ++i)
            col[i] = hits[static_cast<std::size_t>(i) * k + g];
        out.push_back(reduce_indicator(col));
    }
    return out;
}

EstimateWithCI estimate_conditioned_lt(const SimConfig& cfg, LinkState serving_state,
                                       double r_lo, double r_hi, LinkState interferer_type,
                                       double nu, std::int64_t min_accepted) {
    const auto samples = run_sinr_scenes(cfg);
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t accepted = 0;
    for (const auto& s : samples) {
        if (!s || s->serving_state != serving_state) continue;
        if (s->serving_distance < r_lo || s->serving_distance > r_hi) continue;
        const double i_v =
            interferer_type == LinkState::Los ? s->interference_los : s->interference_nlos;
        const double val = std::exp(-nu * i_v);
        sum += val;
        sum_sq += val * val;
        ++accepted;
    }
    if (accepted < min_accepted)
        throw InsufficientSamples("estimate_conditioned_lt: accepted " +
                                  std::to_string(accepted) + " scenes, need " +
                                  std::to_string(min_accepted));
    const double mean = sum / accepted;
    const double var = std::max(sum_sq / accepted - mean * mean, 0.0);
    return {mean, std::sqrt(var / accepted), accepted};
}

void write_scene_dump(std::ostream& os, const SimScene& scene, int dimension,
                      std::int64_t scene_index) {
    os << "scene " << scene_index << "\n";
    for (std::size_t i = 0; i < scene.bs_points.size(); ++i) {
        os << "bs " << scene.bs_points[i].x << " " << scene.bs_points[i].y << " "
           << static_cast<int>(scene.los_flags[i]) << " " << scene.fading[i] << "\n";
    }
    if (dimension == 1) {
        for (double b : scene.blockage_points) os << "blk " << b << "\n";
    } else {
        for (const Segment& s : scene.blockages)
            os << "blk " << s.center.x << " " << s.center.y << " " << s.length << " "
               << s.orientation << "\n";
    }
    os << "end\n";
}

}  // namespace blockcov::sim
