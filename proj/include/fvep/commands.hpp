#pragma once

// Experiment commands behind the `fvep` executable.
//
// Each command resolves its defaults, applies the config file and flag
// overrides, runs the experiment family and writes CSV artifacts plus a
// manifest.json into the output directory.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fvep/config.hpp"
#include "fvep/experiments.hpp"

namespace fvep {

struct CommandOptions {
    std::string command;  // relax | monotone | cyclic | convergence | bench
    std::optional<std::filesystem::path> config;
    std::filesystem::path out = ".";
    std::optional<std::string> model;  // overrides the config model tag
    std::vector<double> dt;            // overrides grid.dt
    std::optional<Algorithm> algorithm;
};

struct CommandResult {
    int exit_code = 0;
    std::vector<std::filesystem::path> files;  // written artifacts, manifest last
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;        // bad config, flags or unsupported model
inline constexpr int kExitFailure = 1;      // runtime or I/O failure

/// Commands the dispatcher knows.
const std::vector<std::string>& command_names();

/// Runs one command. Tables go to `out`, diagnostics to `err`.
CommandResult run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Resolved experiment set of a command, without running it.
struct CommandPlan {
    std::vector<ExperimentConfig> experiments;
    std::vector<std::string> labels;  // file stem per experiment
    BenchmarkOptions bench;
};
CommandPlan plan_command(const CommandOptions& opts, const ConfigFile& cfg);

}  // namespace fvep
