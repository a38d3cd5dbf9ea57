#include "bangbang/harness.hpp"

#include "bangbang/random.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

namespace bangbang {

GuessDomain GuessDomain::oscillator_default() {
  return {Eigen::Vector3d(0.0, 0.0, 1.0), Eigen::Vector3d(1.0, 1.0, 3.0)};
}

GuessDomain GuessDomain::lowthrust_default() {
  return {Vector::Zero(7), Vector::Constant(7, 0.1)};
}

GuessDomain GuessDomain::default_for(const std::string& problem_name) {
  if (problem_name == "oscillator") return oscillator_default();
  if (problem_name == "gto-geo") return lowthrust_default();
  throw std::invalid_argument("no default guess domain for problem '" + problem_name + "'");
}

void GuessDomain::validate(int dim) const {
  if (lower.size() != dim || upper.size() != dim) {
    throw std::invalid_argument("guess domain dimension " + std::to_string(lower.size()) +
                                " does not match shooting dimension " + std::to_string(dim));
  }
  if ((lower.array() > upper.array()).any()) {
    throw std::invalid_argument("guess domain requires lower <= upper in every component");
  }
}

std::string_view to_string(SolveMethod method) {
  return method == SolveMethod::Direct ? "direct" : "continuation";
}

SolveMethod parse_solve_method(std::string_view name) {
  if (name == "direct") return SolveMethod::Direct;
  if (name == "continuation") return SolveMethod::Continuation;
  throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected direct|continuation)");
}

void MonteCarloConfig::validate() const {
  if (n < 1) throw std::invalid_argument("number of runs must be at least 1");
  integ.validate();
  root.validate();
  if (method == SolveMethod::Continuation) {
    schedule.validate();
  } else {
    (void)SmoothingFilter::make(filter, constant);
  }
}

bool RunRecord::same_outcome(const RunRecord& o) const {
  return index == o.index && guess == o.guess && converged == o.converged && solution == o.solution &&
         cost == o.cost && residual_norm == o.residual_norm && iterations == o.iterations &&
         continuation_steps == o.continuation_steps && extras == o.extras && message == o.message;
}

Vector draw_guess(const GuessDomain& domain, std::uint64_t seed, int index) {
  Rng rng(seed, static_cast<std::uint64_t>(index));
  Vector g(domain.lower.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.uniform(domain.lower[i], domain.upper[i]);
  return g;
}

RunRecord run_single(const IndirectProblem& problem, const Vector& guess, int index,
                     const MonteCarloConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.index = index;
  rec.guess = guess;

  SolveReport report;
  SmoothingFilter filter = SmoothingFilter::hard_sign();
  if (config.method == SolveMethod::Direct) {
    filter = SmoothingFilter::make(config.filter, config.constant);
    report = solve_root(
        [&](const Vector& x) { return evaluate_residual(problem, x, filter, config.integ); }, guess,
        config.root);
    rec.continuation_steps = 0;
  } else {
    // Per-run perturbation stream, independent of execution order.
    const std::uint64_t run_seed = Rng(config.seed, 0x9e3779b97f4a7c15ULL ^ index).next_u64();
    const ContinuationReport cr = continue_solve(problem, guess, config.filter, config.schedule,
                                                 config.integ, config.root, run_seed);
    rec.continuation_steps = static_cast<int>(cr.steps.size());
    report = cr.steps.back().report;
    report.converged = cr.converged;
    if (!cr.converged) report.message = cr.message;
    filter = SmoothingFilter::make(config.filter, cr.converged ? cr.final_constant : cr.steps.back().constant);
  }

  rec.converged = report.converged;
  rec.solution = report.solution;
  rec.residual_norm = report.residual_norm;
  rec.iterations = report.iterations;
  rec.message = report.message;
  if (rec.converged) {
    try {
      const Trajectory traj = propagate_solution(problem, rec.solution, filter, config.integ);
      rec.cost = problem.cost_of(traj);
      rec.extras = problem.diagnostics(traj, filter);
    } catch (const EvaluationError& e) {
      rec.converged = false;
      rec.message = std::string("trajectory replay failed: ") + e.what();
    }
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<RunRecord> run_batch_serial(const IndirectProblem& problem, const GuessDomain& domain,
                                        const MonteCarloConfig& config) {
  config.validate();
  domain.validate(problem.shooting_dim());
  std::vector<RunRecord> records;
  records.reserve(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) {
    records.push_back(run_single(problem, draw_guess(domain, config.seed, i), i, config));
  }
  return records;
}

std::vector<RunRecord> run_batch_parallel(const IndirectProblem& problem, const GuessDomain& domain,
                                          const MonteCarloConfig& config) {
  config.validate();
  domain.validate(problem.shooting_dim());
  std::vector<RunRecord> records(static_cast<std::size_t>(config.n));
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < config.n; ++i) {
    records[static_cast<std::size_t>(i)] = run_single(problem, draw_guess(domain, config.seed, i), i, config);
  }
  return records;
}

MonteCarloResult run_monte_carlo(const IndirectProblem& problem, const GuessDomain& domain,
                                 const MonteCarloConfig& config, bool parallel) {
  MonteCarloResult out;
  out.records = parallel ? run_batch_parallel(problem, domain, config) : run_batch_serial(problem, domain, config);
  out.stats = summarize(out.records);
  return out;
}

MonteCarloStats summarize(const std::vector<RunRecord>& input) {
  if (input.empty()) throw std::domain_error("summarize needs at least one record");
  std::vector<const RunRecord*> records;
  records.reserve(input.size());
  for (const auto& r : input) records.push_back(&r);
  std::sort(records.begin(), records.end(), [](const RunRecord* a, const RunRecord* b) {
    return a->index < b->index;
  });

  MonteCarloStats s;
  s.n_runs = static_cast<int>(records.size());
  double cost_sum = 0.0, residual_sum = 0.0, wall_sum = 0.0;
  for (const RunRecord* r : records) {
    wall_sum += r->wall_time;
    if (!r->converged) continue;
    ++s.n_converged;
    residual_sum += r->residual_norm;
    if (r->cost) {
      cost_sum += *r->cost;
      s.cost_min = std::min(s.cost_min.value_or(*r->cost), *r->cost);
      s.cost_max = std::max(s.cost_max.value_or(*r->cost), *r->cost);
    }
    for (const auto& [key, value] : r->extras) {
      auto [it, inserted] = s.extras_range.try_emplace(key, value, value);
      if (!inserted) {
        it->second.first = std::min(it->second.first, value);
        it->second.second = std::max(it->second.second, value);
      }
    }
  }
  s.convergence_fraction = static_cast<double>(s.n_converged) / s.n_runs;
  s.wall_time_mean = wall_sum / s.n_runs;
  if (s.n_converged > 0) {
    s.residual_mean = residual_sum / s.n_converged;
    if (s.cost_min) s.cost_mean = cost_sum / s.n_converged;
  }
  return s;
}

}  // namespace bangbang
