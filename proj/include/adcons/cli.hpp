#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adcons/scenario.hpp"

namespace adcons {

/// Process exit codes. Stable contract.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitSynthesis = 2,
  kExitDivergence = 3,
};

/// Command-line flags that override scenario fields.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<double> threshold;
  std::optional<std::filesystem::path> out;
  bool svg = false;
};

void apply_overrides(Scenario& sc, const CliOverrides& o);

/// Writes gains.json and synth_report.json into the output directory and a
/// human-readable report to `out`.
int run_synth(const Scenario& sc, std::ostream& out, std::ostream& err);

/// Writes states.csv, weights.csv, summary.json (and SVG charts when
/// requested) into the output directory.
int run_simulate(const Scenario& sc, std::ostream& out, std::ostream& err);

/// Prints agent count, edge count, connectivity, lambda_2 and 1/lambda_2.
int run_spectrum(const Topology& t, std::ostream& out);

// File-based entry points. Config problems map to kExitConfig.
int cmd_synth(const std::filesystem::path& scenario, const CliOverrides& o, std::ostream& out,
              std::ostream& err);
int cmd_simulate(const std::filesystem::path& scenario, const CliOverrides& o, std::ostream& out,
                 std::ostream& err);
int cmd_spectrum(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);
int cmd_demo(const std::string& name, const CliOverrides& o, std::ostream& out, std::ostream& err);

/// Simulates independent scenarios on up to `jobs` threads. Output is
/// printed in argument order; returns the largest exit code.
int cmd_batch(const std::vector<std::filesystem::path>& scenarios, const CliOverrides& o,
              unsigned jobs, std::ostream& out, std::ostream& err);

/// Full command line without the program name: synth, simulate, spectrum,
/// demo and batch subcommands with the shared flags. Returns the exit code.
int run_command_line(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adcons
