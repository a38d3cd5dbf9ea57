#include "bangbang/lowthrust.hpp"

#include "bangbang/zero_crossing.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <sstream>

namespace bangbang {

namespace {

const ControlBounds kThrottle{0.0, 1.0};
constexpr double kDegenerateNorm = 1e-14;

// Augmented vector layout.
constexpr int kMass = 6;
constexpr int kCostate = 7;
constexpr int kMassCostate = 13;

using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, 6, 1>>;

double value_of(double v) { return v; }
double value_of(const AD& v) { return v.value(); }

// Two-body MEE control-influence matrix (radial, transverse, normal) and the
// L component of the drift.
template <class T>
void mee_terms(const T& p, const T& f, const T& g, const T& h, const T& k, const T& L, double mu,
               Eigen::Matrix<T, 6, 3>& M, T& drift_L) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (!(value_of(p) > 0.0)) {
    std::ostringstream os;
    os << "semilatus rectum must be positive (p = " << value_of(p) << ")";
    throw DomainError(os.str());
  }
  const T sL = sin(L);
  const T cL = cos(L);
  const T w = 1.0 + f * cL + g * sL;
  if (!(value_of(w) > 0.0)) {
    std::ostringstream os;
    os << "w = 1 + f cos L + g sin L must be positive (w = " << value_of(w) << ")";
    throw DomainError(os.str());
  }
  const T s2 = 1.0 + h * h + k * k;
  const T q = sqrt(p / mu);
  const T hk = h * sL - k * cL;
  const T zero(0.0);

  M(0, 0) = zero;
  M(0, 1) = 2.0 * p * q / w;
  M(0, 2) = zero;
  M(1, 0) = q * sL;
  M(1, 1) = q * ((w + 1.0) * cL + f) / w;
  M(1, 2) = -q * g * hk / w;
  M(2, 0) = -q * cL;
  M(2, 1) = q * ((w + 1.0) * sL + g) / w;
  M(2, 2) = q * f * hk / w;
  M(3, 0) = zero;
  M(3, 1) = zero;
  M(3, 2) = q * s2 * cL / (2.0 * w);
  M(4, 0) = zero;
  M(4, 1) = zero;
  M(4, 2) = q * s2 * sL / (2.0 * w);
  M(5, 0) = zero;
  M(5, 1) = zero;
  M(5, 2) = q * hk / w;

  const T wp = w / p;
  drift_L = sqrt(mu * p) * wp * wp;
}

void require_mass(double m) {
  if (!(m > 0.0)) {
    std::ostringstream os;
    os << "spacecraft mass must be positive (m = " << m << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

void SpacecraftParams::validate() const {
  if (!(m0 > 0.0 && thrust > 0.0 && isp > 0.0 && g0 > 0.0 && mu > 0.0)) {
    throw std::invalid_argument("spacecraft parameters must all be strictly positive");
  }
}

Vector6 MeeState::to_vector() const {
  Vector6 v;
  v << p, f, g, h, k, L;
  return v;
}

MeeState MeeState::from_vector(const Eigen::Ref<const Vector6>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

double MeeState::w() const { return 1.0 + f * std::cos(L) + g * std::sin(L); }

void TransferBoundary::validate() const {
  if (!(initial.p > 0.0) || !(initial.w() > 0.0)) {
    throw std::invalid_argument("initial orbit must have p > 0 and w > 0");
  }
  if (!(p_f > 0.0)) throw std::invalid_argument("target p must be positive");
  if (!(tf_seconds > 0.0)) throw std::invalid_argument("transfer time must be positive");
}

UnitSystem UnitSystem::canonical(const SpacecraftParams& params, double length_km) {
  return {length_km, std::sqrt(length_km * length_km * length_km / params.mu), params.m0};
}

DynamicsConstants DynamicsConstants::in_units(const SpacecraftParams& params, const UnitSystem& u) {
  const double accel_unit = u.length_km / (u.time_s * u.time_s);  // km/s^2
  return {
      params.mu * u.time_s * u.time_s / (u.length_km * u.length_km * u.length_km),
      params.thrust * 1e-3 / (u.mass_kg * accel_unit),
      params.exhaust_velocity_km_s() * u.time_s / u.length_km,
  };
}

MeeMatrices mee_matrices(const MeeState& x, double mu) {
  MeeMatrices out;
  double drift_L = 0.0;
  mee_terms(x.p, x.f, x.g, x.h, x.k, x.L, mu, out.M, drift_L);
  out.D.setZero();
  out.D[5] = drift_L;
  return out;
}

Eigen::Vector3d thrust_direction(const Matrix63& M, const Vector6& lambda) {
  const Eigen::Vector3d v = M.transpose() * lambda;
  const double n = v.norm();
  if (!(n >= kDegenerateNorm)) throw DegenerateDirectionError("||M^T lambda|| vanishes");
  return -v / n;
}

double switching_function(const MeeState& x, const Vector6& lambda, double m, double lambda_m,
                          const DynamicsConstants& constants) {
  require_mass(m);
  const MeeMatrices mm = mee_matrices(x, constants.mu);
  return 1.0 - constants.exhaust_velocity * (mm.M.transpose() * lambda).norm() / m - lambda_m;
}

double switching_function(const MeeState& x, const Vector6& lambda, double m, double lambda_m,
                          const SpacecraftParams& params) {
  return switching_function(x, lambda, m, lambda_m,
                            DynamicsConstants::in_units(params, UnitSystem::physical()));
}

double lowthrust_hamiltonian(const Eigen::Ref<const Vector>& y, double throttle,
                             const DynamicsConstants& c) {
  const double m = y[kMass];
  require_mass(m);
  const MeeMatrices mm = mee_matrices(MeeState::from_vector(y.head<6>()), c.mu);
  const Vector6 lambda = y.segment<6>(kCostate);
  const double nv = (mm.M.transpose() * lambda).norm();
  return c.max_mass_flow() * throttle * (1.0 - y[kMassCostate]) - throttle * c.thrust * nv / m +
         lambda[5] * mm.D[5];
}

ControlSample lowthrust_control(const Eigen::Ref<const Vector>& y, const SmoothingFilter& filter,
                                const DynamicsConstants& c) {
  const double S = switching_function(MeeState::from_vector(y.head<6>()), y.segment<6>(kCostate),
                                      y[kMass], y[kMassCostate], c);
  return {smooth_control(S, kThrottle, filter), S};
}

void lowthrust_aug_dynamics(double, const Eigen::Ref<const Vector>& y, const SmoothingFilter& filter,
                            const DynamicsConstants& c, Eigen::Ref<Vector> dydt) {
  const double m = y[kMass];
  require_mass(m);

  const AD p(y[0], 6, 0), f(y[1], 6, 1), g(y[2], 6, 2), h(y[3], 6, 3), k(y[4], 6, 4), L(y[5], 6, 5);
  Eigen::Matrix<AD, 6, 3> M;
  AD drift_L;
  mee_terms(p, f, g, h, k, L, c.mu, M, drift_L);

  const Vector6 lambda = y.segment<6>(kCostate);
  AD v[3];
  for (int j = 0; j < 3; ++j) {
    v[j] = M(0, j) * lambda[0];
    for (int i = 1; i < 6; ++i) v[j] += M(i, j) * lambda[i];
  }
  const AD nv_ad = sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const double nv = nv_ad.value();

  const double S = 1.0 - c.exhaust_velocity * nv / m - y[kMassCostate];
  const double u = smooth_control(S, kThrottle, filter);
  const double accel = u * c.thrust / m;

  Vector6 xdot = Vector6::Zero();
  xdot[5] = drift_L.value();
  Vector6 lambda_dot = -lambda[5] * drift_L.derivatives();
  if (nv >= kDegenerateNorm) {
    for (int i = 0; i < 6; ++i) {
      double Mv = 0.0;
      for (int j = 0; j < 3; ++j) Mv += M(i, j).value() * v[j].value();
      xdot[i] -= accel * Mv / nv;
    }
    lambda_dot += accel * nv_ad.derivatives();
  }

  dydt.head<6>() = xdot;
  dydt[kMass] = -u * c.max_mass_flow();
  dydt.segment<6>(kCostate) = lambda_dot;
  dydt[kMassCostate] = -accel * nv / m;
}

Vector lowthrust_aug_dynamics(double t, const Vector& y, const SmoothingFilter& filter,
                              const DynamicsConstants& constants) {
  Vector dydt(14);
  lowthrust_aug_dynamics(t, y, filter, constants, dydt);
  return dydt;
}

int count_revolutions(double L0, double Lf) {
  if (!(Lf >= L0)) throw std::domain_error("count_revolutions requires Lf >= L0");
  return static_cast<int>(std::floor((Lf - L0) / (2.0 * std::numbers::pi)));
}

LowThrustProblem::LowThrustProblem(SpacecraftParams params, TransferBoundary boundary,
                                   std::optional<UnitSystem> units)
    : params_(params), boundary_(boundary) {
  params_.validate();
  boundary_.validate();
  units_ = units.value_or(UnitSystem::canonical(params_));
  constants_ = DynamicsConstants::in_units(params_, units_);
  const MeeState& x0 = boundary_.initial;
  initial_state_ << x0.p / units_.length_km, x0.f, x0.g, x0.h, x0.k, x0.L, params_.m0 / units_.mass_kg;
  target_ << boundary_.p_f / units_.length_km, boundary_.f_f, boundary_.g_f, boundary_.h_f, boundary_.k_f;
  tf_ = boundary_.tf_seconds / units_.time_s;
}

std::vector<std::string> LowThrustProblem::augmented_names() const {
  return {"p",        "f",        "g",        "h",        "k",        "L",        "m",
          "lambda_p", "lambda_f", "lambda_g", "lambda_h", "lambda_k", "lambda_L", "lambda_m"};
}

Vector LowThrustProblem::initial_augmented_state(const Vector& eta) const {
  check_shooting_variable(*this, eta);
  Vector y(14);
  y << initial_state_, eta;
  return y;
}

void LowThrustProblem::aug_dynamics(double t, const Vector& y, const SmoothingFilter& filter,
                                    Vector& dydt) const {
  lowthrust_aug_dynamics(t, y, filter, constants_, dydt);
}

Vector LowThrustProblem::terminal_residual(double, const Vector& yf, const SmoothingFilter&) const {
  Vector r(7);
  r.head<5>() = yf.head<5>() - target_;
  r[5] = yf[kCostate + 5];
  r[6] = yf[kMassCostate];
  return r;
}

ControlSample LowThrustProblem::control(double, const Vector& y, const SmoothingFilter& filter) const {
  return lowthrust_control(y, filter, constants_);
}

double LowThrustProblem::hamiltonian(double, const Vector& y, const SmoothingFilter& filter) const {
  return lowthrust_hamiltonian(y, lowthrust_control(y, filter, constants_).control, constants_);
}

double LowThrustProblem::fuel_consumed(const Trajectory& traj) const {
  return (traj.states.front()[kMass] - traj.states.back()[kMass]) * units_.mass_kg;
}

double LowThrustProblem::fuel_quadrature(const Trajectory& traj, const SmoothingFilter& filter) const {
  static const double node = std::sqrt(3.0 / 5.0);
  static const double nodes[3] = {-node, 0.0, node};
  static const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double a = traj.times[i], b = traj.times[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < 3; ++q) {
      const Vector y = traj.state_at(mid + half * nodes[q]);
      integral += weights[q] * half * lowthrust_control(y, filter, constants_).control;
    }
  }
  return constants_.max_mass_flow() * integral * units_.mass_kg;
}

int LowThrustProblem::revolutions(const Trajectory& traj) const {
  return count_revolutions(traj.states.front()[5], traj.states.back()[5]);
}

double LowThrustProblem::cost_of(const Trajectory& traj) const { return fuel_consumed(traj); }

std::map<std::string, double> LowThrustProblem::diagnostics(const Trajectory& traj,
                                                            const SmoothingFilter& filter) const {
  std::vector<double> switching = traj.switching;
  if (switching.size() != traj.size()) {
    switching.resize(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
      switching[i] = lowthrust_control(traj.states[i], filter, constants_).switching;
    }
  }
  return {
      {"delta_m_kg", fuel_consumed(traj)},
      {"fuel_quadrature_kg", fuel_quadrature(traj, filter)},
      {"revolutions", static_cast<double>(revolutions(traj))},
      {"switches", static_cast<double>(count_sign_changes(switching))},
      {"final_mass_kg", traj.final_state()[kMass] * units_.mass_kg},
  };
}

Vector LowThrustProblem::convert_shooting(const Vector& eta, const UnitSystem& other) const {
  check_shooting_variable(*this, eta);
  Vector out = eta;
  const double mass_ratio = units_.mass_kg / other.mass_kg;
  out[0] *= mass_ratio * other.length_km / units_.length_km;
  for (int i = 1; i < 6; ++i) out[i] *= mass_ratio;
  return out;
}

}  // namespace bangbang
