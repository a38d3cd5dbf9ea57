#include "bangbang/problem.hpp"

#include <sstream>

namespace bangbang {

void check_shooting_variable(const IndirectProblem& problem, const Vector& eta) {
  if (eta.size() != problem.shooting_dim()) {
    std::ostringstream os;
    os << problem.name() << ": shooting variable has " << eta.size() << " components, expected "
       << problem.shooting_dim();
    throw std::invalid_argument(os.str());
  }
}

namespace {

Dynamics bind_dynamics(const IndirectProblem& problem, const SmoothingFilter& filter) {
  return [&problem, filter](double t, const Vector& y, Vector& dydt) {
    problem.aug_dynamics(t, y, filter, dydt);
  };
}

}  // namespace

Vector evaluate_residual(const IndirectProblem& problem, const Vector& eta,
                         const SmoothingFilter& filter, const IntegratorConfig& integ) {
  check_shooting_variable(problem, eta);
  const double t0 = problem.initial_time();
  const double tf = problem.final_time(eta);
  if (!(tf >= t0)) throw EvaluationError(problem.name() + ": final time precedes initial time");
  const Vector y0 = problem.initial_augmented_state(eta);
  const Vector yf = propagate(bind_dynamics(problem, filter), y0, t0, tf, integ);
  return problem.terminal_residual(tf, yf, filter);
}

void annotate_controls(const IndirectProblem& problem, const SmoothingFilter& filter, Trajectory& traj) {
  traj.control.resize(traj.size());
  traj.switching.resize(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const ControlSample c = problem.control(traj.times[i], traj.states[i], filter);
    traj.control[i] = c.control;
    traj.switching[i] = c.switching;
  }
}

Trajectory propagate_solution(const IndirectProblem& problem, const Vector& eta,
                              const SmoothingFilter& filter, const IntegratorConfig& integ) {
  check_shooting_variable(problem, eta);
  const double t0 = problem.initial_time();
  const double tf = problem.final_time(eta);
  if (!(tf > t0)) throw EvaluationError(problem.name() + ": final time must exceed initial time");
  Trajectory traj = integrate(bind_dynamics(problem, filter), problem.initial_augmented_state(eta), t0,
                              tf, integ);
  annotate_controls(problem, filter, traj);
  return traj;
}

ProblemSolution solve_problem(const IndirectProblem& problem, const Vector& eta0,
                              const SmoothingFilter& filter, const IntegratorConfig& integ,
                              const RootSolveConfig& root) {
  check_shooting_variable(problem, eta0);
  integ.validate();
  const VectorFunction F = [&](const Vector& eta) {
    return evaluate_residual(problem, eta, filter, integ);
  };
  ProblemSolution out;
  out.report = solve_root(F, eta0, root);
  if (out.report.converged) {
    try {
      out.trajectory = propagate_solution(problem, out.report.solution, filter, integ);
      out.cost = problem.cost_of(*out.trajectory);
    } catch (const EvaluationError& e) {
      out.report.converged = false;
      out.report.message = std::string("converged residual but trajectory replay failed: ") + e.what();
      out.trajectory.reset();
    }
  }
  return out;
}

}  // namespace bangbang
