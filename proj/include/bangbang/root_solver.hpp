#pragma once

#include "bangbang/integrator.hpp"

#include <functional>
#include <string>
#include <string_view>

namespace bangbang {

/// Vector-valued residual map. May throw EvaluationError, which the solver
/// treats as an infinite residual.
using VectorFunction = std::function<Vector(const Vector&)>;

/// DampedNewton: line search along the Newton direction with regularized
/// fallbacks. Dogleg: scaled Powell trust region, better suited to shooting
/// functions whose Jacobian is nearly singular far from the root.
enum class RootMethod { DampedNewton, Dogleg };

std::string_view to_string(RootMethod method);
/// Parses "newton" or "dogleg".
RootMethod parse_root_method(std::string_view name);

struct RootSolveConfig {
  RootMethod method = RootMethod::DampedNewton;
  double residual_tol = 1e-9;
  int max_iterations = 100;
  /// Central-difference step, scaled per component by (|x_j| + 1).
  double fd_step = 1e-7;
  double shrink = 0.5;
  double min_step = 1e-4;
  /// Caps ||dx|| at max_step_ratio * max(||x||, 1) before backtracking.
  double max_step_ratio = 0.5;
  // Dogleg only.
  /// Initial trust radius is this factor times the scaled norm of x0.
  double initial_radius = 100.0;
  /// Gives up when ||F|| fell by less than 1% over this many iterations.
  int stall_window = 10;

  void validate() const;
};

struct SolveReport {
  bool converged = false;
  Vector solution;
  double residual_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double wall_time = 0.0;  // seconds
  std::string message;
};

/// Central-difference Jacobian with one absolute step h for every column.
Matrix fd_jacobian(const VectorFunction& F, const Vector& x, double h);

/// Central-difference Jacobian with a per-column step.
Matrix fd_jacobian(const VectorFunction& F, const Vector& x, const Vector& steps);

/// Solves F(x) = 0 with finite-difference Jacobians.
///
/// DampedNewton takes directions from a QR solve of the Jacobian, or from a
/// Levenberg-regularized least-squares system when the Jacobian is
/// rank-deficient or the Newton direction admits no acceptable step, and
/// backtracks to an Armijo decrease of ||F||_2. Dogleg combines the
/// Gauss-Newton and Cauchy steps inside a trust region scaled by the Jacobian
/// column norms. Neither throws on non-convergence; the report says why.
SolveReport solve_root(const VectorFunction& F, const Vector& x0, const RootSolveConfig& config);

}  // namespace bangbang
