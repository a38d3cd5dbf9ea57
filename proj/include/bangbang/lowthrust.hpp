#pragma once

#include "bangbang/problem.hpp"

#include <Eigen/Dense>

#include <numbers>
#include <optional>

namespace bangbang {

using Matrix63 = Eigen::Matrix<double, 6, 3>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Raised when the MEE state leaves the physical domain (p <= 0, w <= 0, m <= 0).
class DomainError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// ||M^T lambda|| too small to define a thrust direction.
class DegenerateDirectionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Spacecraft and central body, SI with km: kg, N, s, m/s^2, km^3/s^2.
struct SpacecraftParams {
  double m0 = 1500.0;
  double thrust = 1.0;
  double isp = 2000.0;
  double g0 = 9.80665;
  double mu = 398600.4418;

  void validate() const;
  double exhaust_velocity_km_s() const { return g0 * isp * 1e-3; }
  double max_mass_flow_kg_s() const { return thrust / (g0 * isp); }
  double thrust_to_weight() const { return thrust / (m0 * g0); }
};

/// Modified equinoctial elements: p in length units, L in rad.
struct MeeState {
  double p = 0.0;
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
  double k = 0.0;
  double L = 0.0;

  Vector6 to_vector() const;
  static MeeState from_vector(const Eigen::Ref<const Vector6>& v);
  double w() const;
};

/// GTO departure (at apoapsis) to GEO arrival with free true longitude and
/// a fixed transfer time. Physical units (km, s).
struct TransferBoundary {
  MeeState initial{11623.0, 0.75, 0.0, 0.0612, 0.0, std::numbers::pi};
  double p_f = 42165.0;
  double f_f = 0.0;
  double g_f = 0.0;
  double h_f = 0.0;
  double k_f = 0.0;
  double tf_seconds = 1000.0 * 3600.0;

  void validate() const;
};

/// Scales from problem units to km, s and kg.
struct UnitSystem {
  double length_km = 1.0;
  double time_s = 1.0;
  double mass_kg = 1.0;

  /// Length unit 42165 km, time unit such that mu = 1, mass unit m0.
  static UnitSystem canonical(const SpacecraftParams& params, double length_km = 42165.0);
  static UnitSystem physical() { return {}; }
};

/// Model constants expressed in a given unit system.
struct DynamicsConstants {
  double mu;
  double thrust;
  double exhaust_velocity;

  static DynamicsConstants in_units(const SpacecraftParams& params, const UnitSystem& units);
  double max_mass_flow() const { return thrust / exhaust_velocity; }
};

struct MeeMatrices {
  Matrix63 M;  // columns: radial, transverse, normal acceleration
  Vector6 D;   // two-body drift, nonzero only in L
};

/// Control-influence matrix and drift of the two-body MEE equations.
/// Throws DomainError when p <= 0 or w <= 0.
MeeMatrices mee_matrices(const MeeState& x, double mu);

/// -M^T lambda / ||M^T lambda||. Throws DegenerateDirectionError below 1e-14.
Eigen::Vector3d thrust_direction(const Matrix63& M, const Vector6& lambda);

/// S = 1 - c ||M^T lambda|| / m - lambda_m with c the exhaust velocity.
double switching_function(const MeeState& x, const Vector6& lambda, double m, double lambda_m,
                          const DynamicsConstants& constants);

/// Same, with constants in physical units (km, s, kg).
double switching_function(const MeeState& x, const Vector6& lambda, double m, double lambda_m,
                          const SpacecraftParams& params);

/// Hamiltonian with the optimal thrust direction substituted and the throttle
/// given explicitly:
///   H = c_m u (1 - lambda_m) - u T ||M^T lambda|| / m + lambda_L D_L,
/// c_m = T / exhaust velocity. y is the 14-component augmented state.
double lowthrust_hamiltonian(const Eigen::Ref<const Vector>& y, double throttle,
                             const DynamicsConstants& constants);

/// Throttle and switching function at an augmented state.
ControlSample lowthrust_control(const Eigen::Ref<const Vector>& y, const SmoothingFilter& filter,
                                const DynamicsConstants& constants);

/// Rates of y = (p, f, g, h, k, L, m, lambda_p .. lambda_L, lambda_m).
/// Costate rates are -dH/d(x, m) at the current throttle, obtained by
/// forward-mode differentiation of the Hamiltonian.
void lowthrust_aug_dynamics(double t, const Eigen::Ref<const Vector>& y, const SmoothingFilter& filter,
                            const DynamicsConstants& constants, Eigen::Ref<Vector> dydt);

Vector lowthrust_aug_dynamics(double t, const Vector& y, const SmoothingFilter& filter,
                              const DynamicsConstants& constants);

/// floor((Lf - L0) / 2 pi). Throws std::domain_error when Lf < L0.
int count_revolutions(double L0, double Lf);

/// Minimal-fuel GTO to GEO transfer with fixed final time. Shooting variable
/// is (lambda_p, lambda_f, lambda_g, lambda_h, lambda_k, lambda_L, lambda_m)
/// at t = 0, in the problem's unit system.
class LowThrustProblem final : public IndirectProblem {
 public:
  explicit LowThrustProblem(SpacecraftParams params = {}, TransferBoundary boundary = {},
                            std::optional<UnitSystem> units = std::nullopt);

  const SpacecraftParams& params() const { return params_; }
  const TransferBoundary& boundary() const { return boundary_; }
  const UnitSystem& units() const { return units_; }
  const DynamicsConstants& constants() const { return constants_; }

  std::string name() const override { return "gto-geo"; }
  int n_state() const override { return 7; }
  int n_costate() const override { return 7; }
  int shooting_dim() const override { return 7; }
  bool free_final_time() const override { return false; }
  std::vector<std::string> augmented_names() const override;

  double final_time(const Vector&) const override { return tf_; }
  Vector initial_augmented_state(const Vector& eta) const override;
  void aug_dynamics(double t, const Vector& y, const SmoothingFilter& filter, Vector& dydt) const override;
  Vector terminal_residual(double tf, const Vector& yf, const SmoothingFilter& filter) const override;
  ControlSample control(double t, const Vector& y, const SmoothingFilter& filter) const override;
  double hamiltonian(double t, const Vector& y, const SmoothingFilter& filter) const override;
  /// Fuel consumed, kg.
  double cost_of(const Trajectory& traj) const override;
  std::map<std::string, double> diagnostics(const Trajectory& traj,
                                            const SmoothingFilter& filter) const override;

  /// m(t0) - m(tf) in kg.
  double fuel_consumed(const Trajectory& traj) const;
  /// (T / c) * integral of the throttle, in kg, by 3-point Gauss-Legendre
  /// on every step of the interpolated flow.
  double fuel_quadrature(const Trajectory& traj, const SmoothingFilter& filter) const;
  int revolutions(const Trajectory& traj) const;

  /// Re-expresses a shooting variable from this problem's units in `other`.
  Vector convert_shooting(const Vector& eta, const UnitSystem& other) const;

 private:
  using Vector7 = Eigen::Matrix<double, 7, 1>;

  SpacecraftParams params_;
  TransferBoundary boundary_;
  UnitSystem units_;
  DynamicsConstants constants_;
  Vector7 initial_state_;
  Eigen::Matrix<double, 5, 1> target_;
  double tf_;
};

}  // namespace bangbang
