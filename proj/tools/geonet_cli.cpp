// geonet <command> --config <path> [--out <dir>] [--seed <int>] [--svg]
//
// Exit status: 0 all checks pass, 1 a bound check failed or the run did not
// converge, 2 usage or configuration error, 3 numeric failure.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geonet/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stationary 1-cycles by curve shortening and min-max"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    bool svg = false;

    for (geonet::Command c : {geonet::Command::Shorten, geonet::Command::MinMax, geonet::Command::VerifyT1Q2,
                              geonet::Command::VerifyPi1, geonet::Command::GradCheck}) {
        const char* help = "";
        switch (c) {
            case geonet::Command::Shorten: help = "Shorten one input cycle to a geodesic net or a point"; break;
            case geonet::Command::MinMax: help = "Pull a sweepout family down and extract a stationary candidate"; break;
            case geonet::Command::VerifyT1Q2: help = "Check the 4d bound with the refined two-parameter family"; break;
            case geonet::Command::VerifyPi1: help = "Check the 2d closed-geodesic bound on a torus"; break;
            case geonet::Command::GradCheck: help = "Check the first-variation identity on random cycles"; break;
        }
        auto* sub = app.add_subcommand(geonet::to_string(c), help);
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_flag("--svg", svg, "Also write net.svg");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : geonet::kExitUsage;
    }
    const auto command = geonet::parse_command(app.get_subcommands().front()->get_name());

    try {
        const auto cfg = geonet::load_config(config_path, command, seed);
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = geonet::run(cfg, svg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.write(out_dir);
        std::cerr << geonet::to_string(command) << ": " << (result.exit_code == 0 ? "PASS" : "FAIL") << " (exit "
                  << result.exit_code << ", " << secs << " s)";
        if (result.report.contains("error")) std::cerr << ": " << result.report["error"].get<std::string>();
        std::cerr << "\n";
        for (const auto& b : result.report["bounds"])
            std::cerr << "  " << b["name"].get<std::string>() << ": measured " << b["measured"].get<double>()
                      << " vs bound " << b["bound"].get<double>() << (b["satisfied"].get<bool>() ? "  ok" : "  FAILED")
                      << "\n";
        return result.exit_code;
    } catch (const geonet::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return geonet::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return geonet::kExitNumeric;
    }
}
