#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cli.hpp"
#include "ptwalk/version.hpp"

using namespace ptwalk;

int main(int argc, char** argv) {
    CLI::App app{"ptwalk: PT-symmetric discrete-time quantum walk simulator"};
    app.set_version_flag("--version", std::string("ptwalk ") + PTWALK_VERSION);

    std::string command;
    app.add_option("command", command,
                   "one of: ep-grid, trace, tracedist, blp, blp-scan, rhp, entanglement, purity")
        ->required();

    std::string theta1 = "pi/4", theta2 = "-pi/7";
    std::string gamma, gamma_range;
    std::string state = "up", state2 = "plus";
    std::string formalism = "metric";
    std::string out_path = "-";
    std::string format = "csv";
    std::string theta1_range, theta2_range;
    int steps = 50, grid_n = 512, lattice = 32;
    bool no_shift = false, validate_only = false;

    app.add_option("--theta1", theta1, "first coin angle (radians or pi literal)");
    app.add_option("--theta2", theta2, "second coin angle (radians or pi literal)");
    app.add_option("--gamma", gamma, "non-Hermiticity strength");
    app.add_option("--gamma-range", gamma_range, "gamma sweep first:last:step");
    app.add_option("--steps,-T", steps, "number of walk steps");
    app.add_option("--grid", grid_n, "momentum grid size");
    app.add_flag("--no-shift-grid", no_shift, "place grid points on k = 0 and k = -pi");
    app.add_option("--formalism", formalism, "normalised or metric");
    app.add_option("--state", state, "initial coin state: up, plus or 'a,b;c,d'");
    app.add_option("--state2", state2, "second coin state for distance measures");
    app.add_option("--lattice", lattice, "lattice sites for the purity command");
    app.add_option("--theta1-range", theta1_range, "ep-grid theta1 sweep first:last:step");
    app.add_option("--theta2-range", theta2_range, "ep-grid theta2 sweep first:last:step");
    app.add_option("--out", out_path, "output file, '-' for stdout");
    app.add_option("--format", format, "csv or json");
    app.add_flag("--validate", validate_only, "print sweep diagnostics and exit");

    CLI11_PARSE(app, argc, argv);

    cli::ExperimentConfig cfg;
    try {
        cfg.command = cli::parse_command(command);
        cfg.theta1 = cli::parse_angle(theta1);
        cfg.theta2 = cli::parse_angle(theta2);
        if (!gamma.empty() && !gamma_range.empty())
            throw ConfigError("--gamma and --gamma-range are mutually exclusive");
        if (!gamma_range.empty()) {
            cfg.gammas = cli::parse_range(gamma_range);
            cfg.gamma_is_sweep = true;
        } else if (!gamma.empty()) {
            cfg.gammas = {cli::parse_angle(gamma)};
        } else if (cfg.command == cli::Command::BlpScan) {
            cfg.gammas = cli::parse_range("0:0.47:0.012051282051282051");
            cfg.gamma_is_sweep = true;
        } else {
            cfg.gammas = {0.2};
        }
        cfg.steps = steps;
        cfg.grid_n = grid_n;
        cfg.shifted_grid = !no_shift;
        if (formalism == "normalised") cfg.formalism = evolution::Formalism::Normalised;
        else if (formalism == "metric") cfg.formalism = evolution::Formalism::Metric;
        else throw ConfigError("formalism must be 'normalised' or 'metric'");
        cfg.state = cli::parse_state(state);
        cfg.state2 = cli::parse_state(state2);
        cfg.lattice = lattice;
        if (cfg.command == cli::Command::EpGrid) {
            cfg.theta1_range =
                cli::parse_range(theta1_range.empty() ? "0.0314:3.11:0.0314" : theta1_range);
            cfg.theta2_range =
                cli::parse_range(theta2_range.empty() ? "-3.11:-0.0314:0.0314" : theta2_range);
        }
        if (format == "csv") cfg.format = cli::OutputFormat::Csv;
        else if (format == "json") cfg.format = cli::OutputFormat::Json;
        else throw ConfigError("format must be 'csv' or 'json'");

        cli::check_config(cfg);

        if (validate_only) {
            for (const auto& note : cli::validate(cfg)) std::cout << note << "\n";
            return 0;
        }

        std::ofstream file;
        std::ostream* out = &std::cout;
        if (out_path != "-") {
            file.open(out_path, std::ios::binary);
            if (!file) throw ConfigError("cannot open output file '" + out_path + "'");
            out = &file;
        }
        cli::run(cfg, *out);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return 3;
    }
}
