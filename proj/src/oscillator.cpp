#include "bangbang/oscillator.hpp"

#include "bangbang/zero_crossing.hpp"

#include <cmath>
#include <stdexcept>

namespace bangbang {

namespace {

const ControlBounds kBounds{-1.0, 1.0};

}  // namespace

void OscillatorConfig::validate() const {
  if (!std::isfinite(x1_0) || !std::isfinite(x2_0) || !std::isfinite(x1_f) || !std::isfinite(x2_f)) {
    throw std::invalid_argument("oscillator boundary values must be finite");
  }
}

Eigen::Vector4d oscillator_aug_dynamics(double, const Eigen::Vector4d& y, const SmoothingFilter& filter) {
  const double u = smooth_control(y[3], kBounds, filter);
  return {y[1], -y[0] + u, y[3], -y[2]};
}

double oscillator_hamiltonian(const Eigen::Vector4d& y, const SmoothingFilter& filter) {
  const double u = smooth_control(y[3], kBounds, filter);
  return y[2] * y[1] + y[3] * (-y[0] + u) + 1.0;
}

OscillatorProblem::OscillatorProblem(OscillatorConfig config) : config_(config) { config_.validate(); }

std::vector<std::string> OscillatorProblem::augmented_names() const {
  return {"x1", "x2", "lambda1", "lambda2"};
}

Vector OscillatorProblem::initial_augmented_state(const Vector& eta) const {
  check_shooting_variable(*this, eta);
  Vector y(4);
  y << config_.x1_0, config_.x2_0, eta[0], eta[1];
  return y;
}

void OscillatorProblem::aug_dynamics(double t, const Vector& y, const SmoothingFilter& filter,
                                     Vector& dydt) const {
  dydt = oscillator_aug_dynamics(t, y.head<4>(), filter);
}

Vector OscillatorProblem::terminal_residual(double, const Vector& yf, const SmoothingFilter& filter) const {
  Vector r(3);
  r << yf[0] - config_.x1_f, yf[1] - config_.x2_f, oscillator_hamiltonian(yf.head<4>(), filter);
  return r;
}

ControlSample OscillatorProblem::control(double, const Vector& y, const SmoothingFilter& filter) const {
  return {smooth_control(y[3], kBounds, filter), y[3]};
}

double OscillatorProblem::hamiltonian(double, const Vector& y, const SmoothingFilter& filter) const {
  return oscillator_hamiltonian(y.head<4>(), filter);
}

double OscillatorProblem::cost_of(const Trajectory& traj) const { return traj.tf() - traj.t0(); }

std::map<std::string, double> OscillatorProblem::diagnostics(const Trajectory& traj,
                                                             const SmoothingFilter&) const {
  const auto crossings =
      refine_zero_crossings(traj, [](double, const Vector& y) { return y[3]; }, 1e-10);
  std::map<std::string, double> out{{"switches", static_cast<double>(crossings.size())}};
  if (!crossings.empty()) out["first_switch_time"] = crossings.front();
  return out;
}

Vector oscillator_residual(const Vector& eta, const SmoothingFilter& filter, const IntegratorConfig& integ,
                           const OscillatorConfig& config) {
  return evaluate_residual(OscillatorProblem(config), eta, filter, integ);
}

}  // namespace bangbang
