// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "bangbang/harness.hpp"
#include "bangbang/lowthrust.hpp"
#include "bangbang/oscillator.hpp"
#include "bangbang/random.hpp"
#include "bangbang/root_solver.hpp"
#include "bangbang/smoothing.hpp"
#include "bangbang/zero_crossing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

using namespace bangbang;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

constexpr double kMinTime = 2.4980916;

// Single oscillator solve, l2 filter at 1e-8.
void criterion1(double& wall) {
  const auto t0 = std::chrono::steady_clock::now();
  const OscillatorProblem prob;
  const SmoothingFilter filter = SmoothingFilter::l2_norm(1e-8);
  const ProblemSolution sol = solve_problem(prob, vec({0.5, 0.5, 2.0}), filter, IntegratorConfig{}, RootSolveConfig{});
  wall = seconds_since(t0);
  bool ok = sol.report.converged && sol.trajectory.has_value();
  std::ostringstream d;
  if (ok) {
    const double tf = sol.report.solution[2];
    const auto sw = refine_zero_crossings(*sol.trajectory, [](double, const Vector& y) { return y[3]; }, 1e-12);
    ok = std::abs(tf - kMinTime) <= 1e-4 && sol.report.residual_norm <= 1e-8 && sw.size() == 1 &&
         std::abs(sw[0] - 0.9273) <= 5e-3;
    d.precision(8);
    d << "t_f=" << tf << " |F|=" << sol.report.residual_norm << " switches=" << sw.size();
    if (!sw.empty()) d << " at " << sw[0];
  } else {
    d << "not converged: " << sol.report.message;
  }
  d.precision(3);
  d << " (" << wall << " s)";
  report(1, ok, d.str());
}

// Monte-Carlo over the default oscillator domain, plus Hamiltonian checks on
// every converged l2 solution.
void criteria2and3(double& wall) {
  const auto t0 = std::chrono::steady_clock::now();
  const OscillatorProblem prob;
  const GuessDomain dom = GuessDomain::oscillator_default();

  MonteCarloConfig l2;
  l2.n = 1000;
  l2.seed = 2024;
  l2.filter = FilterKind::L2Norm;
  l2.constant = 1e-8;
  const MonteCarloResult a = run_monte_carlo(prob, dom, l2);

  MonteCarloConfig th = l2;
  th.filter = FilterKind::Tanh;
  th.constant = 1e-6;
  const MonteCarloResult b = run_monte_carlo(prob, dom, th);
  wall = seconds_since(t0);

  double lo = INFINITY, hi = -INFINITY;
  for (const auto* res : {&a, &b}) {
    for (const RunRecord& r : res->records) {
      if (!r.converged) continue;
      lo = std::min(lo, *r.cost);
      hi = std::max(hi, *r.cost);
    }
  }
  const double fa = a.stats.convergence_fraction, fb = b.stats.convergence_fraction;
  const bool ok2 = fa >= 0.90 && std::abs(fb - 0.8821) <= 0.15 && hi - lo <= 1e-5;
  std::ostringstream d;
  d << "l2 " << a.stats.n_converged << "/1000 (" << fmt("%.1f", 100 * fa) << "%), tanh " << b.stats.n_converged
    << "/1000 (" << fmt("%.1f", 100 * fb) << "%), t_f spread " << fmt("%.2e", hi - lo) << " (" << fmt("%.1f", wall)
    << " s)";
  report(2, ok2, d.str());

  const SmoothingFilter filter = SmoothingFilter::l2_norm(l2.constant);
  double worst = 0.0;
  int checked = 0;
  for (const RunRecord& r : a.records) {
    if (!r.converged) continue;
    const Trajectory tr = propagate_solution(prob, r.solution, filter, l2.integ);
    for (int i = 0; i < 100; ++i) {
      const double t = tr.tf() * i / 99.0;
      worst = std::max(worst, std::abs(prob.hamiltonian(t, tr.state_at(t), filter)));
    }
    ++checked;
  }
  report(3, checked > 0 && worst <= 1e-5,
         std::to_string(checked) + " converged solutions, max |H| = " + fmt("%.2e", worst));
}

// Low-thrust dynamics without solving.
void criterion4() {
  const LowThrustProblem prob;
  const DynamicsConstants& c = prob.constants();
  const SmoothingFilter filter = SmoothingFilter::l2_norm(1.0);
  Rng rng(99);
  double worst_rate = 0.0, worst_norm = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vector y(14);
    y << rng.uniform(0.2, 1.2), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.2, 0.2),
        rng.uniform(-0.2, 0.2), rng.uniform(0.0, 20.0), rng.uniform(0.8, 1.0);
    for (int i = 7; i < 13; ++i) y[i] = rng.uniform(-1, 1);
    y[13] = rng.uniform(-0.5, 1.5);
    const Vector dy = lowthrust_aug_dynamics(0.0, y, filter, c);
    const double u = lowthrust_control(y, filter, c).control;
    Vector fd(7);
    for (int i = 0; i < 7; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(y[i]));
      Vector yp = y, ym = y;
      yp[i] += h;
      ym[i] -= h;
      fd[i] = -(lowthrust_hamiltonian(yp, u, c) - lowthrust_hamiltonian(ym, u, c)) / (2 * h);
    }
    const Vector rates = dy.tail(7);
    worst_rate = std::max(worst_rate, (rates - fd).cwiseAbs().maxCoeff() / rates.cwiseAbs().maxCoeff());
    Vector6 lam = y.segment<6>(7);
    const MeeMatrices mm = mee_matrices(MeeState::from_vector(y.head<6>()), c.mu);
    worst_norm = std::max(worst_norm, std::abs(thrust_direction(mm.M, lam).norm() - 1.0));
  }

  Vector eta = Vector::Zero(7);
  eta[6] = 2.0;  // S = -1 throughout: full throttle
  IntegratorConfig tight;
  tight.abs_tol = tight.rel_tol = 1e-12;
  const Trajectory tr = propagate_solution(prob, eta, SmoothingFilter::hard_sign(), tight);
  const double dm = prob.fuel_consumed(tr);

  const bool ok = worst_rate <= 1e-6 && worst_norm <= 1e-12 && std::abs(dm - 183.5489) <= 1e-3;
  report(4, ok,
         "costate-rate rel err " + fmt("%.2e", worst_rate) + ", | |alpha|-1 | " + fmt("%.1e", worst_norm) +
             ", full-throttle fuel " + fmt("%.4f", dm) + " kg");
}

// Low-thrust continuation from random guesses.
void criterion5(double& wall) {
  const auto t0 = std::chrono::steady_clock::now();
  const LowThrustProblem prob;
  MonteCarloConfig cfg;
  cfg.n = 5;
  cfg.seed = 1;
  cfg.method = SolveMethod::Continuation;
  cfg.filter = FilterKind::L2Norm;
  cfg.schedule = ContinuationSchedule::for_filter(FilterKind::L2Norm);
  cfg.integ.abs_tol = cfg.integ.rel_tol = 1e-12;
  cfg.root.residual_tol = 1e-6;
  cfg.root.method = RootMethod::Dogleg;
  const MonteCarloResult res = run_monte_carlo(prob, GuessDomain::lowthrust_default(), cfg);
  wall = seconds_since(t0);

  bool ok = false;
  std::ostringstream d;
  for (const RunRecord& r : res.records) {
    d << "[run " << r.index << ": ";
    if (r.converged) {
      const double dm = r.extras.at("delta_m_kg");
      const double revs = r.extras.at("revolutions");
      d << "dm " << fmt("%.2f", dm) << " kg, " << revs << " revs, " << r.extras.at("switches") << " switches, |F| "
        << fmt("%.1e", r.residual_norm);
      ok = ok || (r.residual_norm <= 5e-6 && dm >= 133.0 && dm <= 184.0 && revs >= 47 && revs <= 75);
    } else {
      d << "failed";
    }
    d << "] ";
  }
  d << "(" << fmt("%.0f", wall) << " s)";
  report(5, ok, d.str());
}

// Compact re-run of the property checks that the unit suites cover in depth.
void criterion6() {
  std::vector<std::string> bad;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) bad.emplace_back(what);
  };

  // smoothing: bounds, oddness, sharpening
  for (double delta : {1.0, 1e-2, 1e-4, 1e-8}) {
    for (int i = -200; i <= 200; ++i) {
      const double x = i * 0.05;
      const double s = sat_l2(x, delta);
      expect(std::abs(s) <= 1.0, "l2 bound");
      expect(sat_l2(-x, delta) == -s, "l2 odd");
      expect(std::abs(sat_l2(x, delta / 10)) >= std::abs(s), "l2 sharpening");
      expect(std::abs(sat_tanh(-x, delta) + sat_tanh(x, delta)) == 0.0, "tanh odd");
      if (i > -200) expect(s >= sat_l2(x - 0.05, delta), "l2 monotone");
    }
  }

  // integrator oracles
  IntegratorConfig ic;
  ic.abs_tol = ic.rel_tol = 1e-12;
  const Vector e1 = propagate([](double, const Vector& y, Vector& dy) { dy = y; }, Vector::Ones(1), 0, 1, ic);
  expect(std::abs(e1[0] - std::exp(1.0)) <= 1e-9, "exponential");
  const Vector h = propagate(
      [](double, const Vector& y, Vector& dy) {
        dy.resize(2);
        dy << y[1], -y[0];
      },
      vec({1.0, 0.0}), 0, 2 * std::numbers::pi, ic);
  expect((h - vec({1.0, 0.0})).norm() <= 1e-9, "harmonic");

  // fd_jacobian second-order convergence
  const VectorFunction F = [](const Vector& x) { return vec({std::sin(x[0]) * std::exp(x[1]), x[0] * x[0] * x[1]}); };
  const Vector x0 = vec({0.7, -0.3});
  Matrix J(2, 2);
  J << std::cos(0.7) * std::exp(-0.3), std::sin(0.7) * std::exp(-0.3), 2 * 0.7 * -0.3, 0.49;
  const double e_h = (fd_jacobian(F, x0, 1e-2) - J).norm();
  const double e_h2 = (fd_jacobian(F, x0, 5e-3) - J).norm();
  expect(e_h / e_h2 >= 3.5, "fd order");

  // Newton fixed point
  const VectorFunction G = [](const Vector& x) { return vec({x[0] * x[0] - 4, x[1] - 1}); };
  const SolveReport fix = solve_root(G, vec({2.0, 1.0}), RootSolveConfig{});
  expect(fix.converged && fix.iterations == 0, "newton fixed point");

  // harness determinism and parallel equals serial
  const OscillatorProblem osc;
  MonteCarloConfig mc;
  mc.n = 40;
  mc.seed = 77;
  const auto s1 = run_batch_serial(osc, GuessDomain::oscillator_default(), mc);
  const auto s2 = run_batch_serial(osc, GuessDomain::oscillator_default(), mc);
  const auto p1 = run_batch_parallel(osc, GuessDomain::oscillator_default(), mc);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    expect(s1[i].same_outcome(s2[i]), "harness determinism");
    expect(s1[i].same_outcome(p1[i]), "parallel equals serial");
  }

  // mass monotone on integrated low-thrust trajectories
  const LowThrustProblem lt;
  const GuessDomain ld = GuessDomain::lowthrust_default();
  for (int i = 0; i < 5; ++i) {
    const Trajectory tr = propagate_solution(lt, draw_guess(ld, 3, i), SmoothingFilter::l2_norm(1.0), {});
    for (std::size_t k = 1; k < tr.size(); ++k) expect(tr.states[k][6] <= tr.states[k - 1][6], "mass monotone");
  }

  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  std::string detail = bad.empty() ? "all property checks hold" : "violated:";
  for (const auto& b : bad) detail += " " + b;
  report(6, bad.empty(), detail);
}

}  // namespace

int main() {
  double w1 = 0, w2 = 0, w5 = 0;
  criterion1(w1);
  criteria2and3(w2);
  criterion4();
  criterion5(w5);
  criterion6();
  const bool recorded = std::isfinite(w1) && std::isfinite(w2) && std::isfinite(w5) && w1 > 0 && w2 > 0 && w5 > 0;
  report(7, recorded,
         "wall times recorded, not targets: single solve " + fmt("%.3f", w1) + " s, oscillator batches " +
             fmt("%.1f", w2) + " s, low-thrust continuation " + fmt("%.0f", w5) + " s");
  return failures == 0 ? 0 : 1;
}
