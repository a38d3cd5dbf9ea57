#pragma once

#include "bangbang/problem.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace bangbang {

/// Decade homotopy on the smoothing constant.
struct ContinuationSchedule {
  double start = 1.0;
  double floor = 1e-8;
  double factor = 0.1;
  int max_retries = 10;
  /// Retry perturbation is (constant / perturbation_divisor) * U[0,1)^n.
  double perturbation_divisor = 100.0;

  /// 1 -> 1e-8 for the L2-norm filter, 1 -> 1e-6 for tanh.
  static ContinuationSchedule for_filter(FilterKind kind);

  void validate() const;
  /// start, start * factor, ... ending with the first value <= floor.
  std::vector<double> constants() const;
};

struct ContinuationStep {
  double constant = 0.0;
  int attempt = 0;  // 0 for the first solve at this constant, then 1..max_retries
  Vector guess;
  SolveReport report;
};

struct ContinuationReport {
  bool converged = false;
  FilterKind filter = FilterKind::L2Norm;
  double floor = 0.0;
  std::vector<ContinuationStep> steps;
  Vector final_solution;
  double final_constant = 0.0;
  double total_wall_time = 0.0;
  std::string message;

  /// Number of constants that reached a converged solve.
  int levels_converged() const;
};

using ContinuationObserver = std::function<void(const ContinuationStep&)>;

/// Solves at each constant of the schedule, warm-starting from the previous
/// converged solution. A failed solve is retried from an additively perturbed
/// guess, up to max_retries times per constant; exhausting them ends the run
/// with converged == false. Deterministic for a given seed.
ContinuationReport continue_solve(const IndirectProblem& problem, const Vector& eta0, FilterKind kind,
                                  const ContinuationSchedule& schedule, const IntegratorConfig& integ,
                                  const RootSolveConfig& root, std::uint64_t seed,
                                  const ContinuationObserver& observer = {});

}  // namespace bangbang
