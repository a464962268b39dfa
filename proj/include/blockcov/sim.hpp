#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "blockcov/blockage.hpp"
#include "blockcov/oned.hpp"
#include "blockcov/twod.hpp"

namespace blockcov::sim {

// Deterministic counter-seeded generator (splitmix64-initialized
// xoshiro256++). Scene streams depend only on (seed, stream index), so
// scenes are independent and parallel-safe.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    double uniform();                    // [0, 1)
    double uniform(double a, double b);  // [a, b)
    double exponential();                // Exp(1)
    std::int64_t poisson(double mean);   // via Exp(1) interarrival sums

  private:
    std::uint64_t s_[4];
};

struct SimConfig {
    int dimension = 1;  // 1 or 2
    double window_radius = 0.0;
    double guard_radius = 0.0;
    std::int64_t n_scenes = 1;
    std::uint64_t rng_seed = 1;
    // Redraw each link's blocking state independently (baseline mode).
    bool independent_blocking = false;
    oned::NetworkParams1D params1;
    twod::NetworkParams2D params2;

    void validate() const;
    const PathLossSpec& pathloss() const;
    double noise_power() const;
};

// One realization. 1D scenes put BS/blockage positions on the x axis
// (blockages as points in blockage_points); 2D scenes carry segments.
struct SimScene {
    std::vector<Vec2> bs_points;
    std::vector<double> blockage_points;  // 1D
    std::vector<Segment> blockages;       // 2D
    std::vector<std::uint8_t> los_flags;
    std::vector<double> fading;
    std::optional<std::size_t> serving_index;
};

SimScene generate_scene(const SimConfig& cfg, std::int64_t scene_index);

struct SinrSample {
    double sinr = 0.0;
    LinkState serving_state = LinkState::Los;
    double serving_distance = 0.0;
    std::size_t serving_index = 0;
    double interference_los = 0.0;
    double interference_nlos = 0.0;
};

// Max-average-power association and SINR; records the winner in the
// scene's serving_index. Returns nullopt when every BS delivers zero power
// (possible when all links are blocked under a zero NLoS law).
std::optional<SinrSample> resolve_sinr(SimScene& scene, const SimConfig& cfg);

struct EstimateWithCI {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
};

// Metric descriptors for estimate_curve. Scenes are shared across all grid
// points of one call; estimates are deterministic given (seed, config).
struct CoverageMetric {
    std::vector<double> tau_grid;  // linear SINR thresholds
};
struct RateCoverageMetric {
    std::vector<double> rho_grid;  // bit/s
    twod::RateAllocation alloc;    // 2D only
};
struct BigGMetric {
    LinkState state;
    std::vector<double> r_grid;
};
struct JointLosPoint {
    double r1, r2, theta;
};
struct JointLosMetric {
    std::vector<JointLosPoint> grid;
};

std::vector<EstimateWithCI> estimate_curve(const SimConfig& cfg, const CoverageMetric& m);
std::vector<EstimateWithCI> estimate_curve(const SimConfig& cfg, const RateCoverageMetric& m);
std::vector<EstimateWithCI> estimate_curve(const SimConfig& cfg, const BigGMetric& m);
std::vector<EstimateWithCI> estimate_curve(const SimConfig& cfg, const JointLosMetric& m);
EstimateWithCI estimate_assoc(const SimConfig& cfg, LinkState state);

// Conditional mean of exp(-nu I_v) over scenes whose serving BS has the
// given type and a distance inside [r_lo, r_hi]. Throws InsufficientSamples
// when fewer than min_accepted scenes qualify.
EstimateWithCI estimate_conditioned_lt(const SimConfig& cfg, LinkState serving_state,
                                       double r_lo, double r_hi, LinkState interferer_type,
                                       double nu, std::int64_t min_accepted = 500);

// Text dump, one record per scene: "scene <i>" header, "bs x y los fading"
// and ("blk x" | "blk cx cy length orientation") lines, "end" trailer.
void write_scene_dump(std::ostream& os, const SimScene& scene, int dimension,
                      std::int64_t scene_index);

}  // namespace blockcov::sim
