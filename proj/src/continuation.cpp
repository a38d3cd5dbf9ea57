#include "bangbang/continuation.hpp"

#include "bangbang/random.hpp"

#include <chrono>
#include <cmath>

namespace bangbang {

ContinuationSchedule ContinuationSchedule::for_filter(FilterKind kind) {
  ContinuationSchedule s;
  if (kind == FilterKind::Tanh) s.floor = 1e-6;
  return s;
}

void ContinuationSchedule::validate() const {
  if (!(start > 0.0) || !(floor > 0.0)) throw std::invalid_argument("continuation constants must be positive");
  if (!(floor < start)) throw std::invalid_argument("continuation floor must be below the start constant");
  if (!(factor > 0.0 && factor < 1.0)) throw std::invalid_argument("continuation factor must lie in (0, 1)");
  if (max_retries < 1) throw std::invalid_argument("max_retries must be at least 1");
  if (!(perturbation_divisor > 0.0)) throw std::invalid_argument("perturbation_divisor must be positive");
}

std::vector<double> ContinuationSchedule::constants() const {
  validate();
  std::vector<double> out;
  // Powers are taken directly so that 1e-8 is not missed through rounding
  // of repeated division.
  constexpr double kSlack = 1.0 + 1e-9;
  for (int n = 0;; ++n) {
    const double c = start * std::pow(factor, n);
    out.push_back(c);
    if (c <= floor * kSlack) break;
  }
  return out;
}

int ContinuationReport::levels_converged() const {
  int n = 0;
  for (const auto& s : steps) n += s.report.converged ? 1 : 0;
  return n;
}

ContinuationReport continue_solve(const IndirectProblem& problem, const Vector& eta0, FilterKind kind,
                                  const ContinuationSchedule& schedule, const IntegratorConfig& integ,
                                  const RootSolveConfig& root, std::uint64_t seed,
                                  const ContinuationObserver& observer) {
  check_shooting_variable(problem, eta0);
  if (kind == FilterKind::HardSign) {
    throw std::invalid_argument("continuation needs a smooth filter (l2 or tanh)");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> constants = schedule.constants();

  ContinuationReport out;
  out.filter = kind;
  out.floor = schedule.floor;
  Rng rng(seed);

  auto finish = [&](bool converged, std::string message) {
    out.converged = converged;
    out.message = std::move(message);
    out.total_wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  Vector eta = eta0;
  for (double constant : constants) {
    const SmoothingFilter filter = SmoothingFilter::make(kind, constant);
    const VectorFunction F = [&](const Vector& x) { return evaluate_residual(problem, x, filter, integ); };
    bool solved = false;
    for (int attempt = 0; attempt <= schedule.max_retries; ++attempt) {
      if (attempt > 0) {
        const double scale = constant / schedule.perturbation_divisor;
        for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] += scale * rng.uniform();
      }
      ContinuationStep step{constant, attempt, eta, solve_root(F, eta, root)};
      solved = step.report.converged;
      if (solved) eta = step.report.solution;
      out.steps.push_back(std::move(step));
      if (observer) observer(out.steps.back());
      if (solved) break;
    }
    if (!solved) {
      return finish(false, "no convergence after " + std::to_string(schedule.max_retries) +
                               " perturbations at constant " + std::to_string(constant));
    }
    out.final_solution = eta;
    out.final_constant = constant;
  }
  return finish(true, "reached the continuation floor");
}

}  // namespace bangbang
