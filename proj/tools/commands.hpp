#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace fairdyn::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kConfigError = 2, kNumericFailure = 3 };

/// Largest step residual an emitted equilibrium row may carry.
inline constexpr double kRowResidual = 1e-7;

struct RunOptions {
    std::string out_dir = "out";
    bool plot = false;
};

int cmd_simulate(const ScenarioConfig& c, const RunOptions& run, std::ostream& log);
int cmd_equilibrium(const ScenarioConfig& c, const RunOptions& run, std::ostream& log);
int cmd_sweep(const ScenarioConfig& c, const RunOptions& run, std::ostream& log);
int cmd_suite(const std::string& name, std::uint64_t seed, const RunOptions& run,
              std::ostream& log);
int cmd_check(const ScenarioConfig& c, std::ostream& log);

/// Full command line, exceptions mapped to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fairdyn::cli
