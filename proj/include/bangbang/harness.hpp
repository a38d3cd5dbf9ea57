#pragma once

#include "bangbang/continuation.hpp"
#include "bangbang/problem.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bangbang {

/// Box of initial guesses for the shooting variable.
struct GuessDomain {
  Vector lower;
  Vector upper;

  /// lambda1, lambda2 in [0, 1], t_f in [1, 3].
  static GuessDomain oscillator_default();
  /// All seven initial costates in [0, 0.1].
  static GuessDomain lowthrust_default();
  /// Default box for a problem by name; throws std::invalid_argument if none.
  static GuessDomain default_for(const std::string& problem_name);

  void validate(int dim) const;
};

enum class SolveMethod { Direct, Continuation };

std::string_view to_string(SolveMethod method);
SolveMethod parse_solve_method(std::string_view name);

struct MonteCarloConfig {
  int n = 100;
  std::uint64_t seed = 1;
  SolveMethod method = SolveMethod::Direct;
  FilterKind filter = FilterKind::L2Norm;
  double constant = 1e-8;  // smoothing constant for direct solves
  ContinuationSchedule schedule;
  IntegratorConfig integ;
  RootSolveConfig root;
  int threads = 0;  // 0: OpenMP default

  void validate() const;
};

struct RunRecord {
  int index = 0;
  Vector guess;
  bool converged = false;
  Vector solution;
  std::optional<double> cost;
  double residual_norm = 0.0;
  int iterations = 0;
  int continuation_steps = 0;
  std::map<std::string, double> extras;
  std::string message;
  double wall_time = 0.0;  // seconds; not part of equality

  /// Equality of every deterministic field (everything except wall_time).
  bool same_outcome(const RunRecord& other) const;
};

struct MonteCarloStats {
  int n_runs = 0;
  int n_converged = 0;
  double convergence_fraction = 0.0;
  // Over converged runs only.
  std::optional<double> cost_mean;
  std::optional<double> cost_min;
  std::optional<double> cost_max;
  std::optional<double> residual_mean;
  // Over all runs.
  double wall_time_mean = 0.0;
  /// [min, max] of each extras key over converged runs.
  std::map<std::string, std::pair<double, double>> extras_range;
};

struct MonteCarloResult {
  MonteCarloStats stats;
  std::vector<RunRecord> records;
};

/// Guess for run `index`: depends only on (seed, index).
Vector draw_guess(const GuessDomain& domain, std::uint64_t seed, int index);

/// Solves one guess with the configured method.
RunRecord run_single(const IndirectProblem& problem, const Vector& guess, int index,
                     const MonteCarloConfig& config);

/// Serial reference: runs 0..n-1 in order on the calling thread.
std::vector<RunRecord> run_batch_serial(const IndirectProblem& problem, const GuessDomain& domain,
                                        const MonteCarloConfig& config);

/// OpenMP worker pool over runs; records are returned sorted by index and are
/// identical to run_batch_serial except for wall_time.
std::vector<RunRecord> run_batch_parallel(const IndirectProblem& problem, const GuessDomain& domain,
                                          const MonteCarloConfig& config);

MonteCarloResult run_monte_carlo(const IndirectProblem& problem, const GuessDomain& domain,
                                 const MonteCarloConfig& config, bool parallel = true);

/// Permutation-invariant aggregation. Throws std::domain_error on empty input.
MonteCarloStats summarize(const std::vector<RunRecord>& records);

}  // namespace bangbang
