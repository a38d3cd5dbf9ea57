#pragma once

#include "bangbang/integrator.hpp"
#include "bangbang/root_solver.hpp"
#include "bangbang/smoothing.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bangbang {

struct ControlSample {
  double control;
  double switching;
};

/// An optimal control problem in indirect (state + costate) form, solved by
/// single shooting.
///
/// The shooting variable holds the initial costates, followed by the final
/// time when it is free. For free-final-time problems the last residual
/// component is the Hamiltonian at t_f. Terminal multipliers never appear:
/// costates of free terminal states are driven to zero directly, costates of
/// fixed terminal states are left unconstrained.
///
/// Implementations are immutable; all methods must be safe to call
/// concurrently.
class IndirectProblem {
 public:
  virtual ~IndirectProblem() = default;

  virtual std::string name() const = 0;
  virtual int n_state() const = 0;
  virtual int n_costate() const = 0;
  virtual int shooting_dim() const = 0;
  virtual bool free_final_time() const = 0;

  /// Column names of the augmented vector, states first.
  virtual std::vector<std::string> augmented_names() const = 0;

  virtual double initial_time() const { return 0.0; }
  virtual double final_time(const Vector& eta) const = 0;
  virtual Vector initial_augmented_state(const Vector& eta) const = 0;

  virtual void aug_dynamics(double t, const Vector& y, const SmoothingFilter& filter,
                            Vector& dydt) const = 0;

  /// Terminal constraint violations and transversality components, plus
  /// H(t_f) for free-final-time problems. Length shooting_dim().
  virtual Vector terminal_residual(double tf, const Vector& yf,
                                   const SmoothingFilter& filter) const = 0;

  virtual ControlSample control(double t, const Vector& y, const SmoothingFilter& filter) const = 0;
  virtual double hamiltonian(double t, const Vector& y, const SmoothingFilter& filter) const = 0;

  /// Objective value of a converged, annotated trajectory.
  virtual double cost_of(const Trajectory& traj) const = 0;

  /// Problem-specific per-solution figures (switch counts, revolutions, ...).
  virtual std::map<std::string, double> diagnostics(const Trajectory&, const SmoothingFilter&) const {
    return {};
  }
};

/// Throws std::invalid_argument unless eta has the problem's shooting dimension.
void check_shooting_variable(const IndirectProblem& problem, const Vector& eta);

/// Shooting function: integrate from t0 to t_f(eta) and assemble the
/// terminal residual. t_f == t0 skips integration. Throws EvaluationError
/// when the flow cannot be propagated (including t_f < t0).
Vector evaluate_residual(const IndirectProblem& problem, const Vector& eta,
                         const SmoothingFilter& filter, const IntegratorConfig& integ);

/// Recorded trajectory for eta with control and switching-function samples.
Trajectory propagate_solution(const IndirectProblem& problem, const Vector& eta,
                              const SmoothingFilter& filter, const IntegratorConfig& integ);

/// Fills traj.control / traj.switching from the problem's control law.
void annotate_controls(const IndirectProblem& problem, const SmoothingFilter& filter, Trajectory& traj);

struct ProblemSolution {
  SolveReport report;
  std::optional<Trajectory> trajectory;  // set when converged
  std::optional<double> cost;            // set when converged
};

ProblemSolution solve_problem(const IndirectProblem& problem, const Vector& eta0,
                              const SmoothingFilter& filter, const IntegratorConfig& integ,
                              const RootSolveConfig& root);

}  // namespace bangbang
