#pragma once

#include "bangbang/harness.hpp"
#include "bangbang/lowthrust.hpp"
#include "bangbang/oscillator.hpp"

#include "json.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bangbang::cli {

enum ExitCode : int { kSuccess = 0, kNotConverged = 1, kUsage = 2 };

/// Everything a subcommand needs. Physical quantities are km, s, kg, N.
struct RunConfig {
  std::string problem = "oscillator";
  FilterKind filter = FilterKind::L2Norm;
  std::optional<double> constant;  // default depends on the filter
  IntegratorConfig integ;
  RootSolveConfig root;
  ContinuationSchedule schedule;
  std::optional<Vector> guess;
  std::optional<GuessDomain> domain;
  std::uint64_t seed = 1;
  int n = 100;
  SolveMethod method = SolveMethod::Direct;
  int threads = 0;
  std::string out_dir = ".";
  OscillatorConfig oscillator;
  SpacecraftParams spacecraft;
  TransferBoundary boundary;
  bool canonical_units = true;

  /// Problem-dependent defaults for tolerances and the schedule floor.
  static RunConfig defaults_for(const std::string& problem, FilterKind filter);

  double smoothing_constant() const;
  void validate() const;
};

/// Overlays the keys present in `j` onto `config`. Unknown keys are errors.
void apply_json(const nlohmann::json& j, RunConfig& config);
nlohmann::ordered_json to_json(const RunConfig& config);

std::unique_ptr<IndirectProblem> make_problem(const RunConfig& config);

/// Parses a comma-separated list of numbers.
Vector parse_vector(const std::string& text);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bangbang::cli
