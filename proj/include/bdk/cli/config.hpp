#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdk/montecarlo.hpp"
#include "bdk/popgen.hpp"
#include "bdk/schedule.hpp"
#include "bdk/solvers.hpp"

namespace bdk::cli {

enum class Format { Json, Csv };

/// Subcommands in dispatch order.
const std::vector<std::string>& commands();

struct RunConfig {
    std::string command;

    // Exactly one of these, as the command requires.
    std::optional<nlohmann::json> schedule_text;
    std::vector<RateSchedule> schedules;
    std::optional<MoranParams> moran;
    std::optional<DiffusionParams> diffusion;

    SolverOptions solver;
    SimConfig sim;

    std::string process = "X";        // generator family for stationary/dual/simulate
    std::optional<State> level;       // n for Xn, Zn, excursions
    std::optional<State> init;        // start state for simulate
    std::vector<double> times{0.1, 1.0, 10.0};
    double duality_tol = 1e-8;
    std::optional<double> identity_tol; // default per command: 1e-9, diffusion 1e-8
    State imax = 10;                  // moments/tails reported by diffusion
    State grid = 101;                 // y points in the gamma grid
    bool strict_paper = false;
    bool verbose = false;

    Format format = Format::Json;
    std::optional<std::string> out;

    std::vector<std::string> warnings; // unknown keys under --lenient
};

struct ParseOptions {
    bool lenient = false;
    /// Overrides the config's "command" (the subcommand on the command line).
    std::optional<std::string> command;
};

/// Parses a v1 config document. ParseError (line, column) on malformed
/// text; ValidationError naming the key path otherwise.
RunConfig parse_config(const std::string& text, const ParseOptions& opts = {});

Format parse_format(const std::string& name);

} // namespace bdk::cli
