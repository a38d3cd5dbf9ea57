#include "bangbang/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bangbang {

void IntegratorConfig::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_unit(abs_tol) || !in_unit(rel_tol)) {
    throw std::invalid_argument("integrator tolerances must lie in (0, 1)");
  }
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be positive");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// PI controller constants (Hairer, Norsett & Wanner).
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kSafety = 0.9;
constexpr double kMaxShrink = 5.0;  // 1 / min factor
constexpr double kMaxGrow = 0.1;    // 1 / max factor

void eval(const Dynamics& f, double t, const Vector& y, Vector& dy) {
  f(t, y, dy);
  if (!dy.allFinite()) {
    std::ostringstream os;
    os << "non-finite derivative at t = " << t;
    throw IntegrationError(IntegrationError::Reason::NonFiniteDerivative, t, os.str());
  }
}

// Runs the stepper from t0 to tf, calling on_accept(t, y, dydt) after the
// initial point and after every accepted step.
template <class OnAccept>
Vector run_dopri5(const Dynamics& f, const Vector& y0, double t0, double tf,
                  const IntegratorConfig& cfg, OnAccept&& on_accept) {
  cfg.validate();
  const Eigen::Index n = y0.size();
  Vector y = y0, ynew(n), ytmp(n), err(n);
  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

  double t = t0;
  eval(f, t, y, k1);
  on_accept(t, y, k1);

  double h = std::min(cfg.initial_step, tf - t0);
  double facold = 1e-4;
  bool last_rejected = false;
  long attempts = 0;

  while (t < tf) {
    if (++attempts > cfg.max_steps) {
      std::ostringstream os;
      os << "step limit " << cfg.max_steps << " exceeded at t = " << t;
      throw IntegrationError(IntegrationError::Reason::StepLimit, t, os.str());
    }
    if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os << "step size underflow at t = " << t;
      throw IntegrationError(IntegrationError::Reason::StepUnderflow, t, os.str());
    }
    bool final_step = false;
    if (t + 1.01 * h >= tf) {
      h = tf - t;
      final_step = true;
    }

    ytmp = y + h * a21 * k1;
    eval(f, t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    eval(f, t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    eval(f, t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    eval(f, t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const double t_next = final_step ? tf : t + h;
    eval(f, t_next, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    eval(f, t_next, ynew, k7);

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sk = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = err[i] / sk;
      sum += r * r;
    }
    const double err_norm = std::sqrt(sum / static_cast<double>(n));
    if (!std::isfinite(err_norm)) {
      h *= 0.1;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err_norm, kExpo);
    if (err_norm <= 1.0) {
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::max(kMaxGrow, std::min(kMaxShrink, fac / kSafety));
      double hnew = h / fac;
      if (last_rejected) hnew = std::min(hnew, h);
      facold = std::max(err_norm, 1e-4);
      last_rejected = false;

      t = t_next;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      on_accept(t, y, k1);
      if (final_step) break;
      h = hnew;
    } else {
      h /= std::min(kMaxShrink, fac11 / kSafety);
      last_rejected = true;
    }
  }
  return y;
}

}  // namespace

Trajectory integrate(const Dynamics& dynamics, const Vector& y0, double t0, double tf,
                     const IntegratorConfig& config) {
  if (!(tf > t0)) throw std::invalid_argument("integrate requires tf > t0");
  Trajectory traj;
  run_dopri5(dynamics, y0, t0, tf, config, [&](double t, const Vector& y, const Vector& dy) {
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.derivatives.push_back(dy);
  });
  return traj;
}

Vector propagate(const Dynamics& dynamics, const Vector& y0, double t0, double tf,
                 const IntegratorConfig& config) {
  if (tf == t0) return y0;
  if (!(tf > t0)) throw std::invalid_argument("propagate requires tf >= t0");
  return run_dopri5(dynamics, y0, t0, tf, config, [](double, const Vector&, const Vector&) {});
}

Vector Trajectory::state_at(double t) const {
  if (empty() || t < times.front() || t > times.back()) {
    throw std::out_of_range("Trajectory::state_at outside the integrated span");
  }
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t j = static_cast<std::size_t>(it - times.begin());
  if (j >= times.size()) return states.back();
  const std::size_t i = j - 1;
  const double h = times[j] - times[i];
  const double s = (t - times[i]) / h;
  if (derivatives.size() != states.size()) {
    return (1.0 - s) * states[i] + s * states[j];
  }
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * states[i] + h10 * h * derivatives[i] + h01 * states[j] + h11 * h * derivatives[j];
}

void Trajectory::check() const {
  if (states.size() != times.size()) throw std::logic_error("trajectory: states/times length mismatch");
  if (!derivatives.empty() && derivatives.size() != times.size()) {
    throw std::logic_error("trajectory: derivatives/times length mismatch");
  }
  if (!control.empty() && control.size() != times.size()) {
    throw std::logic_error("trajectory: control/times length mismatch");
  }
  if (!switching.empty() && switching.size() != times.size()) {
    throw std::logic_error("trajectory: switching/times length mismatch");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::logic_error("trajectory: times not strictly increasing");
  }
}

}  // namespace bangbang
