#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "blockcov/oned.hpp"
#include "blockcov/twod.hpp"

namespace blockcov::cli {

enum class CurveKind { Analytic, Iba, LowerBound, UpperBound, Simulated };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& s);

struct SweepSpec {
    enum class Kind { ThresholdDb, BlockageDensity, MaxBlockageLength, Radius, RateBps };
    Kind kind = Kind::ThresholdDb;
    std::vector<double> values;  // strictly increasing, in the axis unit
};

struct VerifySpec {
    double mc_delta_tol = 0.02;
    std::vector<double> thresholds_db = {-10.0, 0.0, 10.0};
    std::int64_t n_scenes = 20000;
};

struct Scenario {
    std::string name;
    int dimension = 1;
    oned::NetworkParams1D params1;
    twod::NetworkParams2D params2;
    SweepSpec sweep;
    std::vector<CurveKind> outputs;
    double fixed_threshold_db = 0.0;  // density sweeps
    twod::RateAllocation alloc;       // rate sweeps
    std::int64_t n_scenes = 20000;
    std::uint64_t seed = 1;
    double window_radius = 0.0;  // 0 -> dimension-appropriate default
    double guard_radius = 0.0;
    VerifySpec verify;
};

struct CurveRecord {
    std::string scenario;
    CurveKind kind = CurveKind::Analytic;
    double x = 0.0;
    double y = 0.0;
    double std_error = 0.0;  // simulated curves only
    std::string metadata;    // "seed=..;n_scenes=..;m_convention=.."

    bool operator==(const CurveRecord&) const = default;
};

// Parses and validates a config (JSON text / file). Throws ConfigError with
// the offending field in the message.
std::vector<Scenario> parse_scenarios_text(const std::string& json_text);
std::vector<Scenario> parse_scenarios_file(const std::string& path);

// Evaluates every requested curve over the sweep grid. Points whose
// quadrature fails to converge are skipped with a note on stderr.
std::vector<CurveRecord> run_scenario(const Scenario& sc);

// CSV: '#' metadata comment lines, then a mandatory "x,curve_kind,y,stderr"
// header row. Reading an emitted file reproduces the records exactly.
void write_csv(std::ostream& os, const std::vector<CurveRecord>& records);
void write_csv_file(const std::string& path, const std::vector<CurveRecord>& records);
std::vector<CurveRecord> read_csv_file(const std::string& path);

// `run`: one CSV per scenario into out_dir; returns a process exit code.
int run_command(const std::string& config_path_or_preset, const std::string& out_dir);

// `verify`: deterministic pass/fail report for each scenario's dimension
// (closed-form identities, bound sandwiches, analytic-vs-MC deltas).
// Returns nonzero when any check fails.
int verify_command(const std::string& config_path_or_preset, std::ostream& os);

// Built-in figure scenario configs.
std::vector<std::string> preset_names();
std::string preset_config(const std::string& name);  // JSON text
bool is_preset(const std::string& name);

}  // namespace blockcov::cli
