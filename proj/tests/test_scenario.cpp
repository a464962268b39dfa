#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blockcov/scenario.hpp"
#include "doctest.h"

using namespace blockcov;
using namespace blockcov::cli;

namespace {

const char* kMinimal1d = R"json({
  "scenarios": [{
    "name": "unit-1d",
    "dimension": 1,
    "lambda_per_km": 10.0,
    "mu_per_m": 0.007,
    "pathloss": {"kind": "bplp", "alpha_los": 2.2, "gain_los_w": 1e-6,
                 "alpha_nlos": 3.6, "gain_nlos_w": 1e-7},
    "noise_dbm_per_hz": -174.0,
    "bandwidth_hz": 1e9,
    "sweep": {"kind": "threshold_db", "values": [-5.0, 0.0, 5.0]},
    "curves": ["analytic", "iba"],
    "sim": {"n_scenes": 2000, "seed": 3},
    "verify": {"mc_delta_tol": 0.05, "thresholds_db": [0.0], "n_scenes": 4000}
  }]
})json";

std::string patch(const std::string& text, const std::string& from, const std::string& to) {
    std::string out = text;
    const auto pos = out.find(from);
    REQUIRE(pos != std::string::npos);
    out.replace(pos, from.size(), to);
    return out;
}

}  // namespace

TEST_CASE("config parsing: units, defaults, validation errors") {
    const auto scenarios = parse_scenarios_text(kMinimal1d);
    REQUIRE(scenarios.size() == 1);
    const Scenario& sc = scenarios[0];
    CHECK(sc.params1.lambda == doctest::Approx(0.01));
    CHECK(sc.params1.noise_power == doctest::Approx(3.9811e-12).epsilon(1e-3));
    CHECK(sc.sweep.values.size() == 3);
    CHECK(sc.n_scenes == 2000);

    CHECK_THROWS_AS(parse_scenarios_text("{}"), ConfigError);
    CHECK_THROWS_AS(parse_scenarios_text(patch(kMinimal1d, R"("values": [-5.0, 0.0, 5.0])",
                                               R"("values": [])")),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenarios_text(patch(kMinimal1d, R"("values": [-5.0, 0.0, 5.0])",
                                               R"("values": [1.0, 1.0])")),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenarios_text(patch(kMinimal1d, R"(["analytic", "iba"])",
                                               R"(["analytic", "wiggly"])")),
                    ConfigError);
    // Coverage bounds are not defined for 1D sweeps.
    CHECK_THROWS_AS(parse_scenarios_text(patch(kMinimal1d, R"(["analytic", "iba"])",
                                               R"(["lower_bound"])")),
                    ConfigError);
    // Rate sweeps are 2D-only.
    CHECK_THROWS_AS(
        parse_scenarios_text(patch(kMinimal1d, R"("kind": "threshold_db")",
                                   R"("kind": "rate_bps")")),
        ConfigError);
}

TEST_CASE("run_scenario: analytic curves, probability range, determinism") {
    const auto scenarios = parse_scenarios_text(kMinimal1d);
    const auto records = run_scenario(scenarios[0]);
    CHECK(records.size() == 6);  // 3 grid points x 2 curves
    for (const auto& r : records) {
        CHECK(r.y >= 0.0);
        CHECK(r.y <= 1.0);
        CHECK(r.scenario == "unit-1d");
        CHECK(r.metadata.find("m_convention=1/1.38") != std::string::npos);
    }
    const auto again = run_scenario(scenarios[0]);
    CHECK(records == again);
}

TEST_CASE("csv: write/read round trip is exact") {
    const auto scenarios = parse_scenarios_text(kMinimal1d);
    const auto records = run_scenario(scenarios[0]);
    const std::string path = "unit_roundtrip.csv";
    write_csv_file(path, records);
    const auto back = read_csv_file(path);
    CHECK(back == records);
    std::remove(path.c_str());

    std::ostringstream os;
    write_csv(os, records);
    const std::string text = os.str();
    CHECK(text.find("x,curve_kind,y,stderr\n") != std::string::npos);
    CHECK(text.find("# scenario=unit-1d") != std::string::npos);
}

TEST_CASE("presets: all parse and validate") {
    const auto names = preset_names();
    CHECK(names.size() == 6);
    for (const auto& name : names) {
        CHECK(is_preset(name));
        const auto scenarios = parse_scenarios_text(preset_config(name));
        CHECK(!scenarios.empty());
    }
    CHECK_FALSE(is_preset("fig-nonexistent"));
    CHECK_THROWS_AS(preset_config("fig-nonexistent"), ConfigError);
}

TEST_CASE("run_command writes one csv per scenario") {
    const std::string cfg_path = "unit_cfg.json";
    {
        std::ofstream out(cfg_path);
        out << kMinimal1d;
    }
    const std::string out_dir = "unit_out";
    CHECK(run_command(cfg_path, out_dir) == 0);
    CHECK(std::filesystem::exists(out_dir + "/unit-1d.csv"));
    const auto back = read_csv_file(out_dir + "/unit-1d.csv");
    CHECK(back.size() == 6);
    std::filesystem::remove_all(out_dir);
    std::remove(cfg_path.c_str());
}

TEST_CASE("verify: deterministic report, corrupted tolerance fails") {
    std::ostringstream a, b;
    const std::string cfg_path = "unit_verify_cfg.json";
    {
        std::ofstream out(cfg_path);
        out << kMinimal1d;
    }
    const int rc_a = verify_command(cfg_path, a);
    const int rc_b = verify_command(cfg_path, b);
    CHECK(rc_a == 0);
    CHECK(rc_b == 0);
    CHECK(a.str() == b.str());  // byte-identical under a fixed seed
    CHECK(a.str().find("RESULT: PASS") != std::string::npos);

    // Corrupting the tolerance to zero must surface failures and a nonzero
    // exit code.
    const std::string broken = patch(kMinimal1d, R"("mc_delta_tol": 0.05)",
                                     R"("mc_delta_tol": 0.0)");
    {
        std::ofstream out(cfg_path);
        out << broken;
    }
    std::ostringstream c;
    CHECK(verify_command(cfg_path, c) != 0);
    CHECK(c.str().find("FAIL") != std::string::npos);
    std::remove(cfg_path.c_str());
}
