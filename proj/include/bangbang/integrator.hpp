#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bangbang {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Right-hand side y' = f(t, y), written into dydt (already sized like y).
using Dynamics = std::function<void(double t, const Vector& y, Vector& dydt)>;

/// Base for every failure that makes a shooting residual unavailable. The
/// root solver treats it as an infinite residual rather than aborting.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public EvaluationError {
 public:
  enum class Reason { StepLimit, StepUnderflow, NonFiniteDerivative };

  IntegrationError(Reason reason, double t, const std::string& what)
      : EvaluationError(what), reason_(reason), t_(t) {}

  Reason reason() const { return reason_; }
  double time() const { return t_; }

 private:
  Reason reason_;
  double t_;
};

struct IntegratorConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double initial_step = 1e-2;
  long max_steps = 2'000'000;

  void validate() const;
};

/// Time-ordered samples of an integrated trajectory. Every accepted step is
/// recorded together with the derivative there, so the flow can be
/// reconstructed between samples by cubic Hermite interpolation.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> derivatives;
  // Filled by the owning problem (see annotate_controls); empty otherwise.
  std::vector<double> control;
  std::vector<double> switching;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double t0() const { return times.front(); }
  double tf() const { return times.back(); }
  const Vector& final_state() const { return states.back(); }

  /// State at t in [t0, tf]. Hermite when derivatives are present, linear
  /// otherwise. Throws std::out_of_range outside the span.
  Vector state_at(double t) const;

  /// Checks the structural invariants (strictly increasing times, matching
  /// lengths). Throws std::logic_error on violation.
  void check() const;
};

/// Embedded Dormand-Prince 5(4) pair with a PI step-size controller.
/// Records every accepted step. tf must be greater than t0.
Trajectory integrate(const Dynamics& dynamics, const Vector& y0, double t0, double tf,
                     const IntegratorConfig& config);

/// Same stepper, returning only y(tf). tf == t0 returns y0 unchanged.
Vector propagate(const Dynamics& dynamics, const Vector& y0, double t0, double tf,
                 const IntegratorConfig& config);

}  // namespace bangbang
