#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ptwalk/measures.hpp"

namespace ptwalk::cli {

enum class Command { EpGrid, Trace, TraceDist, Blp, BlpScan, Rhp, Entanglement, Purity };
enum class OutputFormat { Csv, Json };

/// Fully resolved experiment description. Angles are stored as plain
/// radians; gamma sweeps are expanded to explicit lists.
struct ExperimentConfig {
    Command command = Command::Trace;
    double theta1 = 0.0;
    double theta2 = 0.0;
    std::vector<double> gammas{0.0};
    bool gamma_is_sweep = false;
    int steps = 50;
    int grid_n = 512;
    bool shifted_grid = true;
    evolution::Formalism formalism = evolution::Formalism::Metric;
    numerics::CMat state{2};
    numerics::CMat state2{2};
    int lattice = 32;
    std::vector<double> theta1_range;
    std::vector<double> theta2_range;
    OutputFormat format = OutputFormat::Csv;
};

/// Accepts plain floats and pi literals: "pi/4", "-pi/7", "2pi/3", "0.19".
double parse_angle(const std::string& text);

/// "a:b:step" arithmetic progression, endpoints in angle syntax.
/// Guaranteed nonempty; includes b when it lands within half a step.
std::vector<double> parse_range(const std::string& text);

/// Named preset ("up", "plus") or explicit entries "a,b;c,d" with complex
/// scalars like "0.5+0.5i". Must be a valid density matrix.
numerics::CMat parse_state(const std::string& text);

Command parse_command(const std::string& name);

/// Schema checks beyond parsing (positive counts, range domains).
/// Throws ConfigError.
void check_config(const ExperimentConfig& cfg);

/// Sweep diagnostics: grid collisions with the a(k) = 1 locus and the
/// PT regime of every gamma point.
std::vector<std::string> validate(const ExperimentConfig& cfg);

/// Executes the experiment, writing one table to `out`.
/// Returns 0 on success; ConfigError maps to 2, compute errors to 3
/// (handled by the caller).
void run(const ExperimentConfig& cfg, std::ostream& out);

} // namespace ptwalk::cli
