#pragma once

#include <cstddef>
#include <exception>
#include <numbers>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "latentrank/samplers.hpp"
#include "latentrank/simgen.hpp"

namespace latentrank {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kSchemaVersion = "1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitMissingFile = 2,
  kExitBadInput = 3,
  kExitSamplerError = 4,
};

struct TestRequest {
  TestKind test = TestKind::ranksum;
  std::string input;
  char delimiter = ',';
  // Column selection. ranksum: x+y or value+group. signedrank: x+y (paired,
  // d = y - x), diff, or x+test_value. spearman: x+y.
  std::optional<std::string> x;
  std::optional<std::string> y;
  std::optional<std::string> value;
  std::optional<std::string> group;
  std::optional<std::string> diff;
  std::optional<double> test_value;
  double cauchy_scale = 1.0 / std::numbers::sqrt2;
  ChainConfig config;
  /// Write the prior/posterior density grid here when set.
  std::optional<std::string> plot_grid;
  std::size_t grid_points = 512;
  bool timing = false;

  /// Throws ConfigurationError on an invalid combination of selectors or
  /// settings.
  void validate() const;
};

struct PlotRow {
  double value;
  double prior_density;
  double posterior_density;
};

struct TestOutcome {
  nlohmann::ordered_json result;
  std::vector<PlotRow> grid;  ///< filled only when a grid was requested
};

/// Loads the data, runs the chains and assembles the result document.
/// Throws InputError, InvalidData/ConfigurationError (input problems) or
/// other latentrank::Error subclasses (sampler problems).
TestOutcome run_test(const TestRequest& request);

/// Writes "value,prior_density,posterior_density" rows.
void write_plot_grid(std::ostream& out, const std::vector<PlotRow>& grid);

/// Maps an exception thrown by run_test or run_grid to a process exit code.
int exit_code_for(const std::exception& error);

/// Full command-line entry point: parses arguments, runs the subcommand and
/// writes results to `out` (or the --output file) and messages to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace latentrank
