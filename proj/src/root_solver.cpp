#include "bangbang/root_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace bangbang {

std::string_view to_string(RootMethod method) {
  return method == RootMethod::Dogleg ? "dogleg" : "newton";
}

RootMethod parse_root_method(std::string_view name) {
  if (name == "newton") return RootMethod::DampedNewton;
  if (name == "dogleg") return RootMethod::Dogleg;
  throw std::invalid_argument("unknown root method '" + std::string(name) + "' (expected newton|dogleg)");
}

void RootSolveConfig::validate() const {
  if (!(residual_tol > 0.0)) throw std::invalid_argument("residual_tol must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("shrink must lie in (0, 1)");
  if (!(min_step > 0.0 && min_step <= 1.0)) throw std::invalid_argument("min_step must lie in (0, 1]");
  if (!(max_step_ratio > 0.0)) throw std::invalid_argument("max_step_ratio must be positive");
  if (!(initial_radius > 0.0)) throw std::invalid_argument("initial_radius must be positive");
  if (stall_window < 1) throw std::invalid_argument("stall_window must be at least 1");
}

Matrix fd_jacobian(const VectorFunction& F, const Vector& x, const Vector& steps) {
  if (steps.size() != x.size()) throw std::invalid_argument("fd_jacobian: step/x size mismatch");
  Matrix J;
  Vector xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = steps[j];
    xp[j] = x[j] + h;
    const Vector fp = F(xp);
    xp[j] = x[j] - h;
    const Vector fm = F(xp);
    xp[j] = x[j];
    if (j == 0) J.resize(fp.size(), x.size());
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

Matrix fd_jacobian(const VectorFunction& F, const Vector& x, double h) {
  return fd_jacobian(F, x, Vector::Constant(x.size(), h));
}

namespace {

constexpr double kArmijo = 1e-4;

std::optional<Vector> try_eval(const VectorFunction& F, const Vector& x, int& evaluations) {
  ++evaluations;
  try {
    Vector f = F(x);
    if (!f.allFinite()) return std::nullopt;
    return f;
  } catch (const EvaluationError&) {
    return std::nullopt;
  }
}

std::optional<Vector> newton_direction(const Matrix& J, const Vector& f) {
  Eigen::ColPivHouseholderQR<Matrix> qr(J);
  qr.setThreshold(1e-13);
  if (qr.rank() < J.cols()) return std::nullopt;
  Vector d = qr.solve(-f);
  if (!d.allFinite()) return std::nullopt;
  return d;
}

Vector regularized_direction(const Matrix& J, const Vector& f, double mu) {
  const Matrix JtJ = J.transpose() * J;
  const double scale = std::max(JtJ.diagonal().maxCoeff(), std::numeric_limits<double>::min());
  Matrix A = JtJ;
  A.diagonal().array() += mu * scale;
  return A.ldlt().solve(-J.transpose() * f);
}

}  // namespace

namespace {

struct SolverState {
  Vector x;
  Vector fx;
  double norm;
};

Matrix shooting_jacobian(const VectorFunction& F, const Vector& x, const RootSolveConfig& config,
                         SolveReport& report) {
  const Vector steps = config.fd_step * (x.array().abs() + 1.0).matrix();
  report.evaluations += static_cast<int>(2 * x.size());
  return fd_jacobian(F, x, steps);
}

std::string damped_newton(const VectorFunction& F, SolverState& s, const RootSolveConfig& config,
                          SolveReport& report, bool& converged) {
  while (true) {
    if (s.norm <= config.residual_tol) {
      converged = true;
      return "residual tolerance reached";
    }
    if (report.iterations >= config.max_iterations) return "iteration limit reached";
    ++report.iterations;

    Matrix J;
    try {
      J = shooting_jacobian(F, s.x, config, report);
    } catch (const EvaluationError&) {
      return "jacobian evaluation failed";
    }
    if (!J.allFinite()) return "non-finite jacobian";

    // Backtracking along d; returns true when an Armijo step was accepted.
    auto line_search = [&](Vector d) {
      const double cap = config.max_step_ratio * std::max(s.x.norm(), 1.0);
      if (const double dn = d.norm(); dn > cap) d *= cap / dn;
      for (double alpha = 1.0; alpha >= config.min_step; alpha *= config.shrink) {
        const Vector trial = s.x + alpha * d;
        auto ft = try_eval(F, trial, report.evaluations);
        if (!ft) continue;
        const double tn = ft->norm();
        if (tn <= (1.0 - kArmijo * alpha) * s.norm) {
          s = {trial, std::move(*ft), tn};
          return true;
        }
      }
      return false;
    };

    bool accepted = false;
    if (auto d = newton_direction(J, s.fx)) accepted = line_search(*d);
    for (double mu = 1e-10; !accepted && mu <= 1e2; mu *= 100.0) {
      const Vector d = regularized_direction(J, s.fx, mu);
      if (d.allFinite()) accepted = line_search(d);
    }
    if (!accepted) return "no step reduced the residual";
    report.solution = s.x;
    report.residual_norm = s.norm;
  }
}

// Point on the dogleg path with scaled length at most delta.
Vector dogleg_step(const Matrix& J, const Vector& f, const Vector& diag, double delta,
                   const std::optional<Vector>& gauss_newton) {
  if (gauss_newton && diag.cwiseProduct(*gauss_newton).norm() <= delta) return *gauss_newton;
  const Vector descent = -(J.transpose() * f).cwiseQuotient(diag.cwiseAbs2());
  const Vector Jd = J * descent;
  if (Jd.squaredNorm() == 0.0) return Vector::Zero(f.size());
  const Vector cauchy = descent * (-f.dot(Jd) / Jd.squaredNorm());
  const double cn = diag.cwiseProduct(cauchy).norm();
  if (cn >= delta) return cauchy * (delta / cn);
  if (!gauss_newton) return cauchy;
  // Intersection of the segment cauchy -> gauss_newton with the boundary.
  const Vector a = diag.cwiseProduct(cauchy);
  const Vector b = diag.cwiseProduct(*gauss_newton - cauchy);
  const double qa = b.squaredNorm(), qb = 2.0 * a.dot(b), qc = a.squaredNorm() - delta * delta;
  const double tau = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
  return cauchy + tau * (*gauss_newton - cauchy);
}

std::string dogleg(const VectorFunction& F, SolverState& s, const RootSolveConfig& config,
                   SolveReport& report, bool& converged) {
  Vector diag;
  double delta = 0.0;
  std::vector<double> history{s.norm};
  while (true) {
    if (s.norm <= config.residual_tol) {
      converged = true;
      return "residual tolerance reached";
    }
    if (report.iterations >= config.max_iterations) return "iteration limit reached";
    ++report.iterations;

    Matrix J;
    try {
      J = shooting_jacobian(F, s.x, config, report);
    } catch (const EvaluationError&) {
      return "jacobian evaluation failed";
    }
    if (!J.allFinite()) return "non-finite jacobian";

    const Vector colnorm = J.colwise().norm().transpose();
    if (diag.size() == 0) {
      diag = colnorm.unaryExpr([](double c) { return c > 0.0 ? c : 1.0; });
      delta = config.initial_radius * diag.cwiseProduct(s.x).norm();
      if (delta == 0.0) delta = config.initial_radius;
    } else {
      diag = diag.cwiseMax(colnorm);
    }
    const std::optional<Vector> gn = newton_direction(J, s.fx);

    bool accepted = false;
    while (!accepted) {
      const Vector dx = dogleg_step(J, s.fx, diag, delta, gn);
      const double dxn = diag.cwiseProduct(dx).norm();
      if (!(dxn > 1e-14 * std::max(diag.cwiseProduct(s.x).norm(), 1.0))) {
        return "trust region collapsed";
      }
      const double predicted = s.norm * s.norm - (s.fx + J * dx).squaredNorm();
      if (!(predicted > 0.0)) return "no descent direction";
      const Vector trial = s.x + dx;
      auto ft = try_eval(F, trial, report.evaluations);
      const double tn = ft ? ft->norm() : std::numeric_limits<double>::infinity();
      const double ratio = (s.norm * s.norm - tn * tn) / predicted;
      if (!(ratio >= 0.1)) {
        delta = 0.5 * std::min(delta, dxn);
      } else if (ratio >= 0.75) {
        delta = std::max(delta, 2.0 * dxn);
      }
      if (ratio >= kArmijo) {
        s = {trial, std::move(*ft), tn};
        accepted = true;
      }
    }
    report.solution = s.x;
    report.residual_norm = s.norm;

    history.push_back(s.norm);
    const auto w = static_cast<std::size_t>(config.stall_window);
    if (s.norm > config.residual_tol && history.size() > w &&
        s.norm > 0.99 * history[history.size() - 1 - w]) {
      return "not making progress";
    }
  }
}

}  // namespace

SolveReport solve_root(const VectorFunction& F, const Vector& x0, const RootSolveConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.solution = x0;
  auto finish = [&](bool converged, std::string message) {
    report.converged = converged;
    report.message = std::move(message);
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
  };

  auto f0 = try_eval(F, x0, report.evaluations);
  if (!f0) {
    report.residual_norm = std::numeric_limits<double>::infinity();
    return finish(false, "residual evaluation failed at the initial guess");
  }
  if (f0->size() != x0.size()) {
    throw std::invalid_argument("solve_root: residual dimension differs from unknown dimension");
  }
  SolverState state{x0, *f0, f0->norm()};
  report.residual_norm = state.norm;

  bool converged = false;
  std::string message = config.method == RootMethod::Dogleg
                            ? dogleg(F, state, config, report, converged)
                            : damped_newton(F, state, config, report, converged);
  report.solution = state.x;
  report.residual_norm = state.norm;
  return finish(converged, std::move(message));
}

}  // namespace bangbang
