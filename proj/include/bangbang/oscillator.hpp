#pragma once

#include "bangbang/problem.hpp"

namespace bangbang {

/// Boundary values of the minimal-time oscillator x1' = x2, x2' = -x1 + u,
/// |u| <= 1. Defaults steer (1, 1) to the origin.
struct OscillatorConfig {
  double x1_0 = 1.0;
  double x2_0 = 1.0;
  double x1_f = 0.0;
  double x2_f = 0.0;

  void validate() const;
};

/// Augmented rates for y = (x1, x2, lambda1, lambda2) with u driven by the
/// switching function S = lambda2 on [-1, 1].
Eigen::Vector4d oscillator_aug_dynamics(double t, const Eigen::Vector4d& y, const SmoothingFilter& filter);

/// H = lambda1 x2 + lambda2 (-x1 + u) + 1.
double oscillator_hamiltonian(const Eigen::Vector4d& y, const SmoothingFilter& filter);

/// Shooting variable (lambda1(0), lambda2(0), t_f).
class OscillatorProblem final : public IndirectProblem {
 public:
  explicit OscillatorProblem(OscillatorConfig config = {});

  const OscillatorConfig& config() const { return config_; }

  std::string name() const override { return "oscillator"; }
  int n_state() const override { return 2; }
  int n_costate() const override { return 2; }
  int shooting_dim() const override { return 3; }
  bool free_final_time() const override { return true; }
  std::vector<std::string> augmented_names() const override;

  double final_time(const Vector& eta) const override { return eta[2]; }
  Vector initial_augmented_state(const Vector& eta) const override;
  void aug_dynamics(double t, const Vector& y, const SmoothingFilter& filter, Vector& dydt) const override;
  Vector terminal_residual(double tf, const Vector& yf, const SmoothingFilter& filter) const override;
  ControlSample control(double t, const Vector& y, const SmoothingFilter& filter) const override;
  double hamiltonian(double t, const Vector& y, const SmoothingFilter& filter) const override;
  double cost_of(const Trajectory& traj) const override;
  std::map<std::string, double> diagnostics(const Trajectory& traj,
                                            const SmoothingFilter& filter) const override;

 private:
  OscillatorConfig config_;
};

/// [x1(tf) - x1f, x2(tf) - x2f, H(tf)] for eta = (lambda1(0), lambda2(0), t_f).
Vector oscillator_residual(const Vector& eta, const SmoothingFilter& filter, const IntegratorConfig& integ,
                           const OscillatorConfig& config = {});

}  // namespace bangbang
