#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "blockcov/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"SINR/rate coverage of 1D and 2D mmWave networks under correlated blockage"};
    app.require_subcommand(1);

    std::string config, out_dir = "out", report_path;

    auto* run = app.add_subcommand("run", "evaluate a scenario config, write plot-ready CSV");
    run->add_option("config", config, "config file path or preset name")->required();
    run->add_option("--out", out_dir, "output directory for CSV files");

    auto* verify = app.add_subcommand("verify", "run consistency and analytic-vs-MC checks");
    verify->add_option("config", config, "config file path or preset name")->required();
    verify->add_option("--report", report_path, "also write the report to this file");

    std::string emit_name;
    auto* presets = app.add_subcommand("presets", "list built-in figure scenarios");
    presets->add_option("--emit", emit_name, "print the named preset's config JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return blockcov::cli::run_command(config, out_dir);
        if (verify->parsed()) {
            std::ostringstream report;
            const int rc = blockcov::cli::verify_command(config, report);
            std::cout << report.str();
            if (!report_path.empty()) {
                std::ofstream out(report_path);
                out << report.str();
            }
            return rc;
        }
        if (presets->parsed()) {
            if (!emit_name.empty()) {
                std::cout << blockcov::cli::preset_config(emit_name);
                return 0;
            }
            for (const auto& name : blockcov::cli::preset_names()) std::cout << name << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
