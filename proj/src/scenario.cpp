#include "blockcov/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "blockcov/blockage.hpp"
#include "blockcov/numerics.hpp"
#include "blockcov/sim.hpp"
#include "json.hpp"

namespace blockcov::cli {

namespace {

using nlohmann::json;
constexpr double kPi = M_PI;
constexpr const char* kSlopeNote = "m_convention=1/1.38";

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string fmt(double v, int digits = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace

std::string to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::Analytic: return "analytic";
        case CurveKind::Iba: return "iba";
        case CurveKind::LowerBound: return "lower_bound";
        case CurveKind::UpperBound: return "upper_bound";
        case CurveKind::Simulated: return "simulated";
    }
    return "analytic";
}

CurveKind curve_kind_from_string(const std::string& s) {
    if (s == "analytic") return CurveKind::Analytic;
    if (s == "iba") return CurveKind::Iba;
    if (s == "lower_bound") return CurveKind::LowerBound;
    if (s == "upper_bound") return CurveKind::UpperBound;
    if (s == "simulated") return CurveKind::Simulated;
    throw ConfigError("unknown curve kind '" + s + "'");
}

namespace {

std::vector<double> parse_grid(const json& j, const std::string& ctx) {
    std::vector<double> values;
    if (j.contains("values")) {
        values = j.at("values").get<std::vector<double>>();
    } else {
        const double from = j.at("from").get<double>();
        const double to = j.at("to").get<double>();
        const int points = j.at("points").get<int>();
        if (points < 1) throw ConfigError(ctx + ": points must be >= 1");
        const bool log_spaced = j.value("log", false);
        for (int i = 0; i < points; ++i) {
            const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
            values.push_back(log_spaced ? from * std::pow(to / from, t)
                                        : from + (to - from) * t);
        }
    }
    if (values.empty()) throw ConfigError(ctx + ": empty sweep grid");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw ConfigError(ctx + ": sweep grid must be strictly increasing");
    return values;
}

PathLossSpec parse_pathloss(const json& j, const std::string& ctx) {
    const std::string kind = j.value("kind", "bplp");
    if (kind == "bplp")
        return PathLossSpec::bplp(j.at("gain_los_w").get<double>(),
                                  j.at("alpha_los").get<double>(),
                                  j.at("gain_nlos_w").get<double>(),
                                  j.at("alpha_nlos").get<double>());
    if (kind == "lap")
        return PathLossSpec::lap(j.at("gain_los_w").get<double>(),
                                 j.at("alpha_los").get<double>());
    throw ConfigError(ctx + ".pathloss.kind: expected 'bplp' or 'lap'");
}

BlockageModel parse_blockage(const json& j, const std::string& ctx) {
    BlockageModel m;
    m.mu = j.at("mu_per_km2").get<double>() * 1e-6;
    const json& len = j.at("length");
    const std::string lkind = len.value("kind", "uniform");
    if (lkind == "uniform")
        m.length = LengthDist::uniform(len.at("l_max_m").get<double>());
    else if (lkind == "deterministic")
        m.length = LengthDist::deterministic(len.at("l_m").get<double>());
    else
        throw ConfigError(ctx + ".blockage.length.kind: expected 'uniform' or 'deterministic'");
    m.orientation = OrientationDist::uniform();
    return m;
}

double parse_noise_w(const json& j, double bandwidth) {
    if (j.contains("noise_w")) return j.at("noise_w").get<double>();
    const double dbm_per_hz = j.at("noise_dbm_per_hz").get<double>();
    return std::pow(10.0, (dbm_per_hz - 30.0) / 10.0) * bandwidth;
}

SweepSpec::Kind sweep_kind_from(const std::string& s, const std::string& ctx) {
    if (s == "threshold_db") return SweepSpec::Kind::ThresholdDb;
    if (s == "mu_per_m") return SweepSpec::Kind::BlockageDensity;
    if (s == "l_max_m") return SweepSpec::Kind::MaxBlockageLength;
    if (s == "radius_m") return SweepSpec::Kind::Radius;
    if (s == "rate_bps") return SweepSpec::Kind::RateBps;
    throw ConfigError(ctx + ".sweep.kind: unknown kind '" + s + "'");
}

Scenario parse_scenario(const json& j, std::size_t index) {
    const std::string ctx = "scenarios[" + std::to_string(index) + "]";
    Scenario sc;
    sc.name = j.value("name", "scenario-" + std::to_string(index));
    sc.dimension = j.at("dimension").get<int>();
    if (sc.dimension != 1 && sc.dimension != 2)
        throw ConfigError(ctx + ".dimension: must be 1 or 2");

    const double bandwidth = j.value("bandwidth_hz", 1e9);
    const PathLossSpec pl = parse_pathloss(j.at("pathloss"), ctx);
    if (sc.dimension == 1) {
        sc.params1.lambda = j.at("lambda_per_km").get<double>() * 1e-3;
        sc.params1.mu = j.at("mu_per_m").get<double>();
        sc.params1.pathloss = pl;
        sc.params1.bandwidth = bandwidth;
        sc.params1.noise_power = parse_noise_w(j, bandwidth);
        sc.params1.user_density = j.value("user_density_per_km", 0.0) * 1e-3;
        sc.params1.validate();
    } else {
        sc.params2.lambda = j.at("lambda_per_km2").get<double>() * 1e-6;
        sc.params2.blockage = parse_blockage(j.at("blockage"), ctx);
        sc.params2.pathloss = pl;
        sc.params2.bandwidth = bandwidth;
        sc.params2.noise_power = parse_noise_w(j, bandwidth);
        sc.params2.user_density = j.value("user_density_per_km2", 0.0) * 1e-6;
        sc.params2.validate();
    }

    const json& sw = j.at("sweep");
    sc.sweep.kind = sweep_kind_from(sw.at("kind").get<std::string>(), ctx);
    sc.sweep.values = parse_grid(sw, ctx + ".sweep");
    sc.fixed_threshold_db = j.value("fixed_threshold_db", 0.0);

    for (const auto& c : j.at("curves"))
        sc.outputs.push_back(curve_kind_from_string(c.get<std::string>()));
    if (sc.outputs.empty()) throw ConfigError(ctx + ".curves: at least one curve required");

    const std::string alloc = j.value("rate_allocation", "equal_all");
    if (alloc == "equal_all")
        sc.alloc.mode = twod::RateAllocation::Mode::EqualAll;
    else if (alloc == "los_only")
        sc.alloc.mode = twod::RateAllocation::Mode::LosOnly;
    else
        throw ConfigError(ctx + ".rate_allocation: expected 'equal_all' or 'los_only'");

    if (j.contains("sim")) {
        const json& s = j.at("sim");
        sc.n_scenes = s.value("n_scenes", sc.n_scenes);
        sc.seed = s.value("seed", sc.seed);
        sc.window_radius = s.value("window_m", 0.0);
        sc.guard_radius = s.value("guard_m", 0.0);
    }
    if (sc.n_scenes < 1) throw ConfigError(ctx + ".sim.n_scenes: must be >= 1");

    if (j.contains("verify")) {
        const json& v = j.at("verify");
        sc.verify.mc_delta_tol = v.value("mc_delta_tol", sc.verify.mc_delta_tol);
        if (v.contains("thresholds_db"))
            sc.verify.thresholds_db = v.at("thresholds_db").get<std::vector<double>>();
        sc.verify.n_scenes = v.value("n_scenes", sc.verify.n_scenes);
    }

    // Curve-kind / sweep compatibility.
    const bool wants_bounds =
        std::count(sc.outputs.begin(), sc.outputs.end(), CurveKind::LowerBound) ||
        std::count(sc.outputs.begin(), sc.outputs.end(), CurveKind::UpperBound);
    switch (sc.sweep.kind) {
        case SweepSpec::Kind::ThresholdDb:
            if (wants_bounds && sc.dimension == 1)
                throw ConfigError(ctx + ": coverage bounds are 2D-only curves");
            if (wants_bounds && sc.params2.pathloss.kind != PathKind::Lap)
                throw ConfigError(ctx + ": 2D coverage bounds require the 'lap' path-loss");
            break;
        case SweepSpec::Kind::BlockageDensity:
            if (sc.dimension != 1)
                throw ConfigError(ctx + ": mu_per_m sweeps are 1D-only");
            if (wants_bounds) throw ConfigError(ctx + ": bounds unavailable for mu sweeps");
            break;
        case SweepSpec::Kind::MaxBlockageLength:
            if (sc.dimension != 2)
                throw ConfigError(ctx + ": l_max_m sweeps are 2D-only");
            break;
        case SweepSpec::Kind::Radius:
            break;
        case SweepSpec::Kind::RateBps:
            if (sc.dimension != 2) throw ConfigError(ctx + ": rate sweeps are 2D-only");
            if (wants_bounds) throw ConfigError(ctx + ": bounds unavailable for rate sweeps");
            break;
    }
    return sc;
}

}  // namespace

std::vector<Scenario> parse_scenarios_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.contains("scenarios") || !j.at("scenarios").is_array() || j.at("scenarios").empty())
        throw ConfigError("config must contain a non-empty 'scenarios' array");
    std::vector<Scenario> out;
    for (std::size_t i = 0; i < j.at("scenarios").size(); ++i) {
        try {
            out.push_back(parse_scenario(j.at("scenarios")[i], i));
        } catch (const json::exception& e) {
            throw ConfigError("scenarios[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return out;
}

std::vector<Scenario> parse_scenarios_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenarios_text(ss.str());
}

namespace {

sim::SimConfig make_sim_config(const Scenario& sc) {
    sim::SimConfig cfg;
    cfg.dimension = sc.dimension;
    cfg.n_scenes = sc.n_scenes;
    cfg.rng_seed = sc.seed;
    if (sc.dimension == 1) {
        cfg.params1 = sc.params1;
        cfg.window_radius = sc.window_radius > 0
                                ? sc.window_radius
                                : std::max(2000.0, 12.0 / sc.params1.lambda);
        cfg.guard_radius = sc.guard_radius > 0
                               ? sc.guard_radius
                               : (sc.params1.mu > 0 ? 34.0 / sc.params1.mu : 0.0);
    } else {
        cfg.params2 = sc.params2;
        cfg.window_radius = sc.window_radius > 0
                                ? sc.window_radius
                                : std::max(2000.0, 11.0 / std::sqrt(sc.params2.lambda));
        cfg.guard_radius = sc.guard_radius > 0 ? sc.guard_radius
                                               : sc.params2.blockage.length.max_value();
    }
    return cfg;
}

std::string scenario_metadata(const Scenario& sc) {
    return "seed=" + std::to_string(sc.seed) + ";n_scenes=" + std::to_string(sc.n_scenes) +
           ";" + kSlopeNote;
}

void push_point(std::vector<CurveRecord>& out, const Scenario& sc, CurveKind kind, double x,
                double y, double se = 0.0) {
    out.push_back({sc.name, kind, x, y, se, scenario_metadata(sc)});
}

template <class Fn>
void analytic_sweep(std::vector<CurveRecord>& out, const Scenario& sc, CurveKind kind,
                    const std::vector<double>& xs, Fn&& fn) {
    for (double x : xs) {
        try {
            push_point(out, sc, kind, x, fn(x));
        } catch (const NonConvergence& e) {
            std::cerr << "warning: " << sc.name << " " << to_string(kind) << " at x=" << x
                      << ": " << e.what() << "\n";
        }
    }
}

// Tail integral of a closed-form g bound: 2 pi lambda int_r g(x) x dx.
double big_g_from_bound(const twod::NetworkParams2D& p, double r, bool upper) {
    num::QuadSpec spec;
    spec.rel_tol = 1e-8;
    spec.abs_tol = 1e-12;
    spec.tail_cutoff_exponent = 40.0;
    const double beta = p.beta();
    const auto g = [&](double x) {
        const twod::BoundPair b = twod::g_2d_bounds(p, LinkState::Los, x);
        return (upper ? b.upper : b.lower) * x;
    };
    return 2.0 * kPi * p.lambda * num::integrate_exp_tail(g, r, std::max(beta, 1e-6), spec);
}

std::vector<CurveRecord> run_threshold_sweep(const Scenario& sc) {
    std::vector<CurveRecord> out;
    const std::vector<double>& dbs = sc.sweep.values;
    for (CurveKind kind : sc.outputs) {
        if (kind == CurveKind::Analytic) {
            analytic_sweep(out, sc, kind, dbs, [&](double db) {
                const double tau = db_to_linear(db);
                return sc.dimension == 1 ? oned::coverage_1d(sc.params1, tau)
                                         : twod::coverage_2d(sc.params2, tau);
            });
        } else if (kind == CurveKind::Iba) {
            analytic_sweep(out, sc, kind, dbs, [&](double db) {
                const double tau = db_to_linear(db);
                return sc.dimension == 1
                           ? oned::coverage_1d_iba(sc.params1, tau)
                           : twod::coverage_2d(sc.params2, tau, twod::Correlation::Independent);
            });
        } else if (kind == CurveKind::LowerBound || kind == CurveKind::UpperBound) {
            analytic_sweep(out, sc, kind, dbs, [&](double db) {
                const twod::BoundPair b = twod::coverage_2d_bounds(sc.params2, db_to_linear(db));
                return kind == CurveKind::LowerBound ? b.lower : b.upper;
            });
        } else {
            sim::CoverageMetric m;
            for (double db : dbs) m.tau_grid.push_back(db_to_linear(db));
            const auto est = sim::estimate_curve(make_sim_config(sc), m);
            for (std::size_t i = 0; i < dbs.size(); ++i)
                push_point(out, sc, kind, dbs[i], est[i].mean, est[i].std_error);
        }
    }
    return out;
}

std::vector<CurveRecord> run_density_sweep(const Scenario& sc) {
    std::vector<CurveRecord> out;
    const double tau = db_to_linear(sc.fixed_threshold_db);
    for (CurveKind kind : sc.outputs) {
        if (kind == CurveKind::Simulated) {
            for (double mu : sc.sweep.values) {
                Scenario point = sc;
                point.params1.mu = mu;
                sim::CoverageMetric m;
                m.tau_grid = {tau};
                const auto est = sim::estimate_curve(make_sim_config(point), m);
                push_point(out, sc, kind, mu, est[0].mean, est[0].std_error);
            }
        } else {
            analytic_sweep(out, sc, kind, sc.sweep.values, [&](double mu) {
                oned::NetworkParams1D p = sc.params1;
                p.mu = mu;
                return kind == CurveKind::Analytic ? oned::coverage_1d(p, tau)
                                                   : oned::coverage_1d_iba(p, tau);
            });
        }
    }
    return out;
}

twod::NetworkParams2D params_at_l_max(const twod::NetworkParams2D& base, double l_max) {
    twod::NetworkParams2D p = base;
    const double beta = base.beta();
    p.blockage.length = LengthDist::uniform(l_max);
    p.blockage.mu = kPi * beta / l_max;  // holds beta fixed: beta = 2 mu (l_max/2) / pi
    return p;
}

std::vector<CurveRecord> run_l_max_sweep(const Scenario& sc) {
    std::vector<CurveRecord> out;
    const twod::BoundPair ab = twod::assoc_bounds_2d(sc.params2);
    for (CurveKind kind : sc.outputs) {
        if (kind == CurveKind::LowerBound) {
            for (double l : sc.sweep.values) push_point(out, sc, kind, l, ab.lower);
        } else if (kind == CurveKind::UpperBound) {
            for (double l : sc.sweep.values) push_point(out, sc, kind, l, ab.upper);
        } else if (kind == CurveKind::Simulated) {
            for (double l : sc.sweep.values) {
                Scenario point = sc;
                point.params2 = params_at_l_max(sc.params2, l);
                point.guard_radius = std::max(sc.guard_radius, l);
                const auto est = sim::estimate_assoc(make_sim_config(point), LinkState::Los);
                push_point(out, sc, kind, l, est.mean, est.std_error);
            }
        } else {
            const auto mode = kind == CurveKind::Analytic ? twod::Correlation::Correlated
                                                          : twod::Correlation::Independent;
            analytic_sweep(out, sc, kind, sc.sweep.values, [&](double l) {
                return twod::assoc_prob_2d(params_at_l_max(sc.params2, l), LinkState::Los,
                                           mode);
            });
        }
    }
    return out;
}

std::vector<CurveRecord> run_radius_sweep(const Scenario& sc) {
    std::vector<CurveRecord> out;
    for (CurveKind kind : sc.outputs) {
        if (kind == CurveKind::Simulated) {
            sim::BigGMetric m;
            m.state = LinkState::Los;
            m.r_grid = sc.sweep.values;
            const auto est = sim::estimate_curve(make_sim_config(sc), m);
            for (std::size_t i = 0; i < est.size(); ++i)
                push_point(out, sc, kind, sc.sweep.values[i], est[i].mean, est[i].std_error);
        } else if (kind == CurveKind::LowerBound || kind == CurveKind::UpperBound) {
            if (sc.dimension != 2) throw ConfigError("G_L bounds are 2D-only curves");
            analytic_sweep(out, sc, kind, sc.sweep.values, [&](double r) {
                return big_g_from_bound(sc.params2, r, kind == CurveKind::UpperBound);
            });
        } else {
            analytic_sweep(out, sc, kind, sc.sweep.values, [&](double r) {
                if (sc.dimension == 1) {
                    if (kind == CurveKind::Iba) {
                        num::QuadSpec spec;
                        spec.rel_tol = 1e-9;
                        spec.abs_tol = 1e-13;
                        return 2.0 * sc.params1.lambda *
                               num::integrate_exp_tail(
                                   [&](double x) {
                                       return oned::g_1d_iba(sc.params1, LinkState::Los, x);
                                   },
                                   r, sc.params1.lambda, spec);
                    }
                    return oned::big_g_1d(sc.params1, LinkState::Los, r);
                }
                const auto mode = kind == CurveKind::Analytic ? twod::Correlation::Correlated
                                                              : twod::Correlation::Independent;
                return twod::big_g_2d(sc.params2, LinkState::Los, r, mode);
            });
        }
    }
    return out;
}

std::vector<CurveRecord> run_rate_sweep(const Scenario& sc) {
    std::vector<CurveRecord> out;
    for (CurveKind kind : sc.outputs) {
        if (kind == CurveKind::Simulated) {
            sim::RateCoverageMetric m;
            m.rho_grid = sc.sweep.values;
            m.alloc = sc.alloc;
            const auto est = sim::estimate_curve(make_sim_config(sc), m);
            for (std::size_t i = 0; i < est.size(); ++i)
                push_point(out, sc, kind, sc.sweep.values[i], est[i].mean, est[i].std_error);
        } else {
            const auto mode = kind == CurveKind::Analytic ? twod::Correlation::Correlated
                                                          : twod::Correlation::Independent;
            analytic_sweep(out, sc, kind, sc.sweep.values, [&](double rho) {
                return twod::rate_coverage_2d(sc.params2, sc.alloc, rho, mode);
            });
        }
    }
    return out;
}

}  // namespace

std::vector<CurveRecord> run_scenario(const Scenario& sc) {
    switch (sc.sweep.kind) {
        case SweepSpec::Kind::ThresholdDb: return run_threshold_sweep(sc);
        case SweepSpec::Kind::BlockageDensity: return run_density_sweep(sc);
        case SweepSpec::Kind::MaxBlockageLength: return run_l_max_sweep(sc);
        case SweepSpec::Kind::Radius: return run_radius_sweep(sc);
        case SweepSpec::Kind::RateBps: return run_rate_sweep(sc);
    }
    return {};
}

void write_csv(std::ostream& os, const std::vector<CurveRecord>& records) {
    if (!records.empty()) {
        os << "# scenario=" << records.front().scenario << "\n";
        os << "# " << records.front().metadata << "\n";
    }
    os << "x,curve_kind,y,stderr\n";
    for (const CurveRecord& r : records) {
        os << fmt(r.x) << "," << to_string(r.kind) << "," << fmt(r.y) << ","
           << fmt(r.std_error) << "\n";
    }
}

void write_csv_file(const std::string& path, const std::vector<CurveRecord>& records) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    write_csv(out, records);
}

std::vector<CurveRecord> read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file '" + path + "'");
    std::string line, scenario, metadata;
    std::vector<CurveRecord> out;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.substr(line.find_first_not_of("# "));
            if (body.rfind("scenario=", 0) == 0)
                scenario = body.substr(9);
            else
                metadata = body;
            continue;
        }
        if (!header_seen) {
            if (line != "x,curve_kind,y,stderr")
                throw ConfigError("CSV header row missing or malformed in '" + path + "'");
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string xs, kind, ys, es;
        if (!std::getline(ss, xs, ',') || !std::getline(ss, kind, ',') ||
            !std::getline(ss, ys, ',') || !std::getline(ss, es, ','))
            throw ConfigError("malformed CSV row: " + line);
        CurveRecord r;
        r.scenario = scenario;
        r.kind = curve_kind_from_string(kind);
        r.x = std::stod(xs);
        r.y = std::stod(ys);
        r.std_error = std::stod(es);
        r.metadata = metadata;
        out.push_back(r);
    }
    if (!header_seen) throw ConfigError("CSV header row missing in '" + path + "'");
    return out;
}

namespace {

std::string resolve_config_text(const std::string& path_or_preset) {
    if (is_preset(path_or_preset)) return preset_config(path_or_preset);
    std::ifstream in(path_or_preset);
    if (!in) throw ConfigError("no such config file or preset: '" + path_or_preset + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int run_command(const std::string& config_path_or_preset, const std::string& out_dir) {
    const auto scenarios = parse_scenarios_text(resolve_config_text(config_path_or_preset));
    std::filesystem::create_directories(out_dir);
    for (const Scenario& sc : scenarios) {
        const auto records = run_scenario(sc);
        const std::string path = out_dir + "/" + sc.name + ".csv";
        write_csv_file(path, records);
        std::cout << "wrote " << path << " (" << records.size() << " records)\n";
    }
    return 0;
}

namespace {

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

void check(std::vector<Check>& checks, const std::string& name, bool pass,
           const std::string& detail) {
    checks.push_back({name, pass, detail});
}

void verify_1d(const Scenario& sc, std::vector<Check>& checks) {
    const oned::NetworkParams1D& p = sc.params1;

    // Closed-form LoS association probability under the zero-NLoS law.
    {
        bool ok = true;
        std::string detail;
        for (double ratio : {0.5, 1.0, 2.0, 5.0}) {
            oned::NetworkParams1D q = p;
            q.pathloss = PathLossSpec::lap(1e-6, 2.2);
            q.mu = std::max(p.mu, 1e-4);
            q.lambda = ratio * q.mu;
            const double got = oned::assoc_prob_1d(q, LinkState::Los);
            const double want = ratio * (2.0 + ratio) / ((1.0 + ratio) * (1.0 + ratio));
            if (std::fabs(got - want) > 1e-8) ok = false;
            detail += "ratio=" + fmt(ratio, 3) + " err=" + fmt(got - want, 3) + " ";
        }
        check(checks, "1d-lap-assoc-closed-form", ok, detail);
    }

    // Independence overestimates LoS association.
    {
        const double corr = oned::assoc_prob_1d(p, LinkState::Los);
        const double iba = oned::assoc_prob_1d_iba(p, LinkState::Los);
        check(checks, "1d-iba-dominance", iba + 1e-9 >= corr,
              "corr=" + fmt(corr, 6) + " iba=" + fmt(iba, 6));
    }

    // Conditional-density expectation matches the closed form. The inner
    // integral is split at the conditional density's breakpoints so the
    // adaptive rule sees smooth pieces.
    {
        bool ok = true;
        std::string detail;
        num::QuadSpec spec;
        spec.rel_tol = 1e-10;
        spec.abs_tol = 1e-15;
        spec.tail_cutoff_exponent = 38.0;
        for (double x : {1.0, 10.0, 50.0}) {
            const double e1 = excl_e1(p.pathloss, x);
            const double e2 = excl_e2(p.pathloss, x);
            for (LinkState s : {LinkState::Los, LinkState::Nlos}) {
                const auto inner = [&](double q) {
                    const auto f = [&](double qp) {
                        return p.mu * std::exp(-p.mu * qp) * oned::g_cond_1d(p, s, x, q, qp);
                    };
                    double total = 0.0;
                    double lo = 0.0;
                    for (double b : {std::min(e1, x), x, std::isfinite(e2) ? e2 : x}) {
                        if (b > lo) {
                            total += num::integrate(f, lo, b, spec);
                            lo = b;
                        }
                    }
                    total += num::integrate_exp_tail(f, lo, p.mu, spec);
                    return p.mu * std::exp(-p.mu * q) * total;
                };
                const double expect =
                    s == LinkState::Los
                        ? num::integrate_exp_tail(inner, x, p.mu, spec)
                        : num::integrate(inner, 0.0, x, spec);
                const double direct = oned::g_1d(p, s, x);
                if (std::fabs(direct - expect) > 1e-8 * std::max(1e-6, std::fabs(direct)))
                    ok = false;
            }
            detail += "x=" + fmt(x, 3) + " ";
        }
        check(checks, "1d-g-expectation-consistency", ok, detail);
    }

    // Coverage monotone in the threshold.
    {
        std::vector<double> taus = sc.verify.thresholds_db;
        std::sort(taus.begin(), taus.end());
        bool ok = true;
        double prev = 2.0;
        std::string detail;
        for (double db : taus) {
            const double c = oned::coverage_1d(p, db_to_linear(db));
            if (c > prev + 1e-6) ok = false;
            prev = c;
            detail += fmt(db, 3) + "dB=" + fmt(c, 6) + " ";
        }
        check(checks, "1d-coverage-monotone", ok, detail);
    }

    // Analytic coverage against the seeded simulator.
    {
        sim::CoverageMetric m;
        for (double db : sc.verify.thresholds_db) m.tau_grid.push_back(db_to_linear(db));
        Scenario mc = sc;
        mc.n_scenes = sc.verify.n_scenes;
        const auto est = sim::estimate_curve(make_sim_config(mc), m);
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < m.tau_grid.size(); ++i) {
            const double ana = oned::coverage_1d(p, m.tau_grid[i]);
            const double delta = std::fabs(ana - est[i].mean);
            if (delta > sc.verify.mc_delta_tol) ok = false;
            detail += fmt(sc.verify.thresholds_db[i], 3) + "dB|d|=" + fmt(delta, 3) + " ";
        }
        check(checks, "1d-coverage-vs-mc", ok,
              detail + "tol=" + fmt(sc.verify.mc_delta_tol, 3));
    }
}

void verify_2d(const Scenario& sc, std::vector<Check>& checks) {
    const twod::NetworkParams2D& p = sc.params2;
    const BlockageModel& bm = p.blockage;

    // Both evaluation routes of the blocked-region measure agree.
    {
        bool ok = true;
        std::string detail;
        for (const auto& [r1, r2, th] :
             {std::tuple{50.0, 50.0, kPi / 2}, {60.0, 40.0, kPi / 3}, {20.0, 80.0, 5 * kPi / 6}}) {
            const double a = curly_n(bm, r1, r2, th);
            const double b = curly_n_area(bm, r1, r2, th);
            const double rel = std::fabs(a - b) / std::max(1e-300, std::fabs(a));
            if (rel > 1e-6) ok = false;
            detail += "rel=" + fmt(rel, 3) + " ";
        }
        check(checks, "2d-curly-n-route-agreement", ok, detail);
    }

    // Independent / maximally-correlated sandwich of the joint probability.
    {
        bool ok = true;
        for (double r1 : {20.0, 80.0})
            for (double r2 : {20.0, 80.0})
                for (double th : {kPi / 6, kPi / 2, 5 * kPi / 6}) {
                    const double pll = joint_prob(bm, LinkState::Los, LinkState::Los, r1, r2, th);
                    const auto [lo, hi] = joint_prob_bounds(bm, r1, r2, th);
                    if (!(lo - 1e-9 <= pll && pll <= hi + 1e-9)) ok = false;
                }
        check(checks, "2d-joint-bounds-sandwich", ok, "grid 2x2x3");
    }

    // Closed-form envelopes around g_L.
    {
        bool ok = true;
        for (double x : {5.0, 20.0, 50.0, 100.0, 200.0}) {
            const double g = twod::g_2d(p, LinkState::Los, x);
            const twod::BoundPair b = twod::g_2d_bounds(p, LinkState::Los, x);
            if (!(b.lower - 1e-6 <= g && g <= b.upper + 1e-6)) ok = false;
        }
        check(checks, "2d-g-bounds-sandwich", ok, "x in {5,20,50,100,200}");
    }

    // Linear sandwich of sin^2 under the implemented slope convention.
    {
        const double m = twod::kSinSquaredSlope;
        double worst = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double x = 0.5 * kPi * i / 1000.0;
            const double s2 = std::sin(x) * std::sin(x);
            worst = std::max(worst, s2 - m * x);
            worst = std::max(worst, (1.0 + m * (x - 0.5 * kPi)) - s2);
        }
        check(checks, "2d-sin-squared-sandwich", worst <= 1e-4, "violation=" + fmt(worst, 3));
    }

    // Joint LoS probability against the segment-process simulator.
    {
        sim::JointLosMetric m;
        m.grid = {{30.0, 30.0, kPi / 2}, {60.0, 40.0, kPi / 3}, {80.0, 80.0, 2 * kPi / 3}};
        sim::SimConfig cfg;
        cfg.dimension = 2;
        cfg.params2 = p;
        cfg.n_scenes = sc.verify.n_scenes;
        cfg.rng_seed = sc.seed;
        cfg.window_radius = 100.0;
        cfg.guard_radius = bm.length.max_value();
        const auto est = sim::estimate_curve(cfg, m);
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < m.grid.size(); ++i) {
            const double ana = joint_prob(bm, LinkState::Los, LinkState::Los, m.grid[i].r1,
                                          m.grid[i].r2, m.grid[i].theta);
            const double delta = std::fabs(ana - est[i].mean);
            const double tol = 3.0 * est[i].std_error + 1e-3;
            if (delta > tol) ok = false;
            detail += "|d|=" + fmt(delta, 3) + " ";
        }
        check(checks, "2d-joint-vs-mc", ok, detail);
    }

    // Analytic coverage against the seeded simulator.
    {
        sim::CoverageMetric m;
        for (double db : sc.verify.thresholds_db) m.tau_grid.push_back(db_to_linear(db));
        Scenario mc = sc;
        mc.n_scenes = sc.verify.n_scenes;
        const auto est = sim::estimate_curve(make_sim_config(mc), m);
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < m.tau_grid.size(); ++i) {
            const double ana = twod::coverage_2d(p, m.tau_grid[i]);
            const double delta = std::fabs(ana - est[i].mean);
            if (delta > sc.verify.mc_delta_tol) ok = false;
            detail += fmt(sc.verify.thresholds_db[i], 3) + "dB|d|=" + fmt(delta, 3) + " ";
        }
        check(checks, "2d-coverage-vs-mc", ok,
              detail + "tol=" + fmt(sc.verify.mc_delta_tol, 3));
    }
}

}  // namespace

int verify_command(const std::string& config_path_or_preset, std::ostream& os) {
    const auto scenarios = parse_scenarios_text(resolve_config_text(config_path_or_preset));
    std::vector<Check> checks;
    for (const Scenario& sc : scenarios) {
        os << "scenario " << sc.name << "\n";
        const std::size_t first = checks.size();
        if (sc.dimension == 1)
            verify_1d(sc, checks);
        else
            verify_2d(sc, checks);
        for (std::size_t i = first; i < checks.size(); ++i)
            os << (checks[i].pass ? "PASS " : "FAIL ") << checks[i].name << " ("
               << checks[i].detail << ")\n";
    }
    const std::size_t failed =
        std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; });
    os << "RESULT: " << (failed == 0 ? "PASS" : "FAIL") << " (" << checks.size() - failed
       << "/" << checks.size() << " checks)\n";
    return failed == 0 ? 0 : 1;
}

namespace {

const char* kPreset1dCoverage = R"json({
  "scenarios": [{
    "name": "fig-1d-coverage",
    "dimension": 1,
    "lambda_per_km": 10.0,
    "mu_per_m": 0.007,
    "pathloss": {"kind": "bplp", "alpha_los": 2.2, "gain_los_w": 1e-6,
                 "alpha_nlos": 3.6, "gain_nlos_w": 1e-7},
    "noise_dbm_per_hz": -174.0,
    "bandwidth_hz": 1e9,
    "sweep": {"kind": "threshold_db", "from": -10.0, "to": 40.0, "points": 26},
    "curves": ["analytic", "iba", "simulated"],
    "sim": {"n_scenes": 100000, "seed": 7},
    "verify": {"mc_delta_tol": 0.02, "thresholds_db": [-10, 0, 10], "n_scenes": 50000}
  }]
})json";

const char* kPreset1dCoverageVsMu = R"json({
  "scenarios": [{
    "name": "fig-1d-coverage-vs-mu",
    "dimension": 1,
    "lambda_per_km": 10.0,
    "mu_per_m": 0.007,
    "pathloss": {"kind": "bplp", "alpha_los": 2.2, "gain_los_w": 1e-6,
                 "alpha_nlos": 3.6, "gain_nlos_w": 1e-7},
    "noise_dbm_per_hz": -174.0,
    "bandwidth_hz": 1e9,
    "fixed_threshold_db": 0.0,
    "sweep": {"kind": "mu_per_m", "from": 0.0005, "to": 0.05, "points": 20, "log": true},
    "curves": ["analytic", "iba"],
    "sim": {"n_scenes": 20000, "seed": 7}
  }]
})json";

const char* kPreset2dGl = R"json({
  "scenarios": [{
    "name": "fig-2d-gl-vs-r",
    "dimension": 2,
    "lambda_per_km2": 30.0,
    "blockage": {"mu_per_km2": 220.0, "length": {"kind": "uniform", "l_max_m": 200.0}},
    "pathloss": {"kind": "bplp", "alpha_los": 2.2, "gain_los_w": 1e-6,
                 "alpha_nlos": 3.6, "gain_nlos_w": 1e-7},
    "noise_dbm_per_hz": -174.0,
    "bandwidth_hz": 1e9,
    "sweep": {"kind": "radius_m", "from": 0.0, "to": 200.0, "points": 21},
    "curves": ["analytic", "iba", "lower_bound", "upper_bound", "simulated"],
    "sim": {"n_scenes": 20000, "seed": 7}
  }]
})json";

// The simulated curve carries its own scenario over a reduced grid: short
// blockages at fixed beta need enormous center densities, so scenes below
// 5 m lengths are analytic-only.
const char* kPreset2dAssocVsLmax = R"json({
  "scenarios": [{
    "name": "fig-2d-assoc-vs-lmax",
    "dimension": 2,
    "lambda_per_km2": 30.0,
    "blockage": {"mu_per_km2": 220.0, "length": {"kind": "uniform", "l_max_m": 200.0}},
    "pathloss": {"kind": "bplp", "alpha_los": 2.2, "gain_los_w": 1e-6,
                 "alpha_nlos": 3.6, "gain_nlos_w": 1e-7},
    "noise_dbm_per_hz": -174.0,
    "bandwidth_hz": 1e9,
    "sweep": {"kind": "l_max_m", "values": [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000]},
    "curves": ["analytic", "iba", "lower_bound"]
  }, {
    "name": "fig-2d-assoc-vs-lmax-sim",
    "dimension": 2,
    "lambda_per_km2": 30.0,
    "blockage": {"mu_per_km2": 220.0, "length": {"kind": "uniform", "l_max_m": 200.0}},
    "pathloss": {"kind": "bplp", "alpha_los": 2.2, "gain_los_w": 1e-6,
                 "alpha_nlos": 3.6, "gain_nlos_w": 1e-7},
    "noise_dbm_per_hz": -174.0,
    "bandwidth_hz": 1e9,
    "sweep": {"kind": "l_max_m", "values": [5, 10, 20, 50, 100, 200, 500, 1000, 2000]},
    "curves": ["simulated"],
    "sim": {"n_scenes": 4000, "seed": 7}
  }]
})json";

const char* kPreset2dCoverage = R"json({
  "scenarios": [{
    "name": "fig-2d-coverage",
    "dimension": 2,
    "lambda_per_km2": 30.0,
    "blockage": {"mu_per_km2": 220.0, "length": {"kind": "uniform", "l_max_m": 200.0}},
    "pathloss": {"kind": "bplp", "alpha_los": 2.2, "gain_los_w": 1e-6,
                 "alpha_nlos": 3.6, "gain_nlos_w": 1e-7},
    "noise_dbm_per_hz": -174.0,
    "bandwidth_hz": 1e9,
    "sweep": {"kind": "threshold_db", "from": -10.0, "to": 30.0, "points": 21},
    "curves": ["analytic", "iba", "simulated"],
    "sim": {"n_scenes": 20000, "seed": 7},
    "verify": {"mc_delta_tol": 0.03, "thresholds_db": [-10, 0, 10], "n_scenes": 20000}
  }]
})json";

const char* kPreset2dRate = R"json({
  "scenarios": [{
    "name": "fig-2d-rate",
    "dimension": 2,
    "lambda_per_km2": 30.0,
    "blockage": {"mu_per_km2": 220.0, "length": {"kind": "uniform", "l_max_m": 200.0}},
    "pathloss": {"kind": "bplp", "alpha_los": 2.2, "gain_los_w": 1e-6,
                 "alpha_nlos": 3.6, "gain_nlos_w": 1e-7},
    "noise_dbm_per_hz": -174.0,
    "bandwidth_hz": 1e9,
    "user_density_per_km2": 200.0,
    "rate_allocation": "equal_all",
    "sweep": {"kind": "rate_bps", "from": 1e6, "to": 2e8, "points": 15, "log": true},
    "curves": ["analytic", "simulated"],
    "sim": {"n_scenes": 20000, "seed": 7}
  }]
})json";

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig-1d-coverage", "fig-1d-coverage-vs-mu", "fig-2d-gl-vs-r",
            "fig-2d-assoc-vs-lmax", "fig-2d-coverage", "fig-2d-rate"};
}

std::string preset_config(const std::string& name) {
    if (name == "fig-1d-coverage") return kPreset1dCoverage;
    if (name == "fig-1d-coverage-vs-mu") return kPreset1dCoverageVsMu;
    if (name == "fig-2d-gl-vs-r") return kPreset2dGl;
    if (name == "fig-2d-assoc-vs-lmax") return kPreset2dAssocVsLmax;
    if (name == "fig-2d-coverage") return kPreset2dCoverage;
    if (name == "fig-2d-rate") return kPreset2dRate;
    throw ConfigError("no such preset: '" + name + "'");
}

bool is_preset(const std::string& name) {
    const auto names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace blockcov::cli
