#include "cli.hpp"

#include "bangbang/io.hpp"
#include "bangbang/random.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace bangbang::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Copies j[key] into target when present.
template <typename T>
void take(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

Vector json_vector(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trajectory_csv(const IndirectProblem& problem, const Trajectory& traj) {
  std::ostringstream os;
  io::write_csv(os, io::make_table(traj, problem.augmented_names()));
  return os.str();
}

io::Json diagnostics_json(const std::map<std::string, double>& d) {
  io::Json j = io::Json::object();
  for (const auto& [k, v] : d) j[k] = io::number(v);
  return j;
}

Vector initial_guess(const RunConfig& config, const IndirectProblem& problem) {
  if (config.guess) return *config.guess;
  const GuessDomain domain = config.domain ? *config.domain : GuessDomain::default_for(problem.name());
  domain.validate(problem.shooting_dim());
  return draw_guess(domain, config.seed, 0);
}

// Report, trajectory and diagnostics for a final shooting variable.
io::Json solution_json(const RunConfig& config, const IndirectProblem& problem, const SolveReport& report,
                       const SmoothingFilter& filter, const fs::path& out_dir) {
  io::Json j{{"problem", problem.name()},
             {"filter", std::string(to_string(filter.kind()))},
             {"constant", filter.constant()},
             {"report", io::to_json(report)},
             {"cost", nullptr},
             {"diagnostics", io::Json::object()},
             {"config", to_json(config)}};
  if (report.converged) {
    const Trajectory traj = propagate_solution(problem, report.solution, filter, config.integ);
    j["cost"] = io::number(problem.cost_of(traj));
    j["diagnostics"] = diagnostics_json(problem.diagnostics(traj, filter));
    write_file(out_dir / "trajectory.csv", trajectory_csv(problem, traj));
  }
  return j;
}

fs::path prepare_out_dir(const RunConfig& config) {
  fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  const auto problem = make_problem(config);
  const Vector guess = initial_guess(config, *problem);
  check_shooting_variable(*problem, guess);
  const fs::path dir = prepare_out_dir(config);
  const SmoothingFilter filter = SmoothingFilter::make(config.filter, config.smoothing_constant());
  const SolveReport report = solve_root(
      [&](const Vector& x) { return evaluate_residual(*problem, x, filter, config.integ); }, guess,
      config.root);
  io::Json doc = solution_json(config, *problem, report, filter, dir);
  doc["guess"] = io::vector_json(guess);
  write_file(dir / "report.json", io::dump(doc));
  out << (report.converged ? "converged" : "not converged") << ": |F| = " << report.residual_norm
      << ", iterations = " << report.iterations;
  if (!doc["cost"].is_null()) out << ", cost = " << doc["cost"].get<double>();
  out << " (" << report.message << ")\n";
  return report.converged ? kSuccess : kNotConverged;
}

int cmd_continue(const RunConfig& config, std::ostream& out) {
  if (config.filter == FilterKind::HardSign) throw ConfigError("continuation needs --filter l2 or tanh");
  const auto problem = make_problem(config);
  const Vector guess = initial_guess(config, *problem);
  check_shooting_variable(*problem, guess);
  const fs::path dir = prepare_out_dir(config);
  const ContinuationReport cr =
      continue_solve(*problem, guess, config.filter, config.schedule, config.integ, config.root, config.seed,
                     [&](const ContinuationStep& s) {
                       out << "constant " << s.constant << " attempt " << s.attempt << ": "
                           << (s.report.converged ? "converged" : "failed") << ", |F| = "
                           << s.report.residual_norm << ", iterations = " << s.report.iterations << "\n";
                     });
  io::Json history = io::to_json(cr);
  history["problem"] = problem->name();
  history["seed"] = config.seed;
  history["initial_guess"] = io::vector_json(guess);
  write_file(dir / "history.json", io::dump(history));

  SolveReport last = cr.steps.back().report;
  last.converged = cr.converged;
  const SmoothingFilter filter = SmoothingFilter::make(config.filter, cr.steps.back().constant);
  io::Json doc = solution_json(config, *problem, last, filter, dir);
  doc["guess"] = io::vector_json(guess);
  write_file(dir / "report.json", io::dump(doc));
  out << (cr.converged ? "converged" : "not converged") << " after " << cr.steps.size() << " solves";
  if (!doc["cost"].is_null()) out << ", cost = " << doc["cost"].get<double>();
  out << " (" << cr.message << ")\n";
  return cr.converged ? kSuccess : kNotConverged;
}

int cmd_montecarlo(const RunConfig& config, std::ostream& out) {
  const auto problem = make_problem(config);
  const GuessDomain domain = config.domain ? *config.domain : GuessDomain::default_for(problem->name());
  domain.validate(problem->shooting_dim());
  MonteCarloConfig mc;
  mc.n = config.n;
  mc.seed = config.seed;
  mc.method = config.method;
  mc.filter = config.filter;
  mc.constant = config.smoothing_constant();
  mc.schedule = config.schedule;
  mc.integ = config.integ;
  mc.root = config.root;
  mc.threads = config.threads;
  mc.validate();
  const fs::path dir = prepare_out_dir(config);

  const MonteCarloResult result = run_monte_carlo(*problem, domain, mc, true);

  io::Json stats = io::to_json(result.stats);
  stats["problem"] = problem->name();
  stats["method"] = std::string(to_string(config.method));
  stats["filter"] = std::string(to_string(config.filter));
  stats["seed"] = config.seed;
  write_file(dir / "stats.json", io::dump(stats));
  std::ostringstream jsonl, csv;
  io::write_jsonl(jsonl, result.records);
  io::write_records_csv(csv, result.records);
  write_file(dir / "records.jsonl", jsonl.str());
  write_file(dir / "records.csv", csv.str());
  io::Json timings = io::Json::array();
  for (const auto& r : result.records) timings.push_back({{"index", r.index}, {"wall_time", r.wall_time}});
  write_file(dir / "timings.json", io::dump(timings));

  const auto& s = result.stats;
  out << s.n_converged << " of " << s.n_runs << " converged (" << 100.0 * s.convergence_fraction << "%)";
  if (s.cost_mean) out << ", mean cost " << *s.cost_mean << " in [" << *s.cost_min << ", " << *s.cost_max << "]";
  out << "\n";
  return kSuccess;
}

int cmd_export(const RunConfig& config, const std::string& report_path, std::ostream& out) {
  RunConfig cfg = config;
  if (!report_path.empty()) {
    const json doc = json::parse(slurp(report_path));
    cfg.guess = json_vector(doc.at("report").at("solution"));
    cfg.filter = parse_filter_kind(doc.at("filter").get<std::string>());
    cfg.constant = doc.at("constant").get<double>();
  }
  if (!cfg.guess) throw ConfigError("export needs --guess or --report");
  const auto problem = make_problem(cfg);
  check_shooting_variable(*problem, *cfg.guess);
  const fs::path dir = prepare_out_dir(cfg);
  const SmoothingFilter filter = SmoothingFilter::make(cfg.filter, cfg.smoothing_constant());
  const Trajectory traj = propagate_solution(*problem, *cfg.guess, filter, cfg.integ);
  write_file(dir / "trajectory.csv", trajectory_csv(*problem, traj));
  out << "wrote " << traj.size() << " samples to " << (dir / "trajectory.csv").string() << "\n";
  return kSuccess;
}

}  // namespace

RunConfig RunConfig::defaults_for(const std::string& problem, FilterKind filter) {
  RunConfig c;
  c.problem = problem;
  c.filter = filter;
  c.schedule = ContinuationSchedule::for_filter(filter);
  if (problem == "gto-geo") {
    c.integ.abs_tol = c.integ.rel_tol = 1e-12;
    c.root.residual_tol = 1e-6;
    c.root.method = RootMethod::Dogleg;
    c.method = SolveMethod::Continuation;
  }
  return c;
}

double RunConfig::smoothing_constant() const {
  if (constant) return *constant;
  return filter == FilterKind::Tanh ? 1e-6 : 1e-8;
}

void RunConfig::validate() const {
  if (problem != "oscillator" && problem != "gto-geo") {
    throw ConfigError("unknown problem '" + problem + "' (expected oscillator|gto-geo)");
  }
  (void)SmoothingFilter::make(filter, smoothing_constant());
  integ.validate();
  root.validate();
  schedule.validate();
  if (n < 1) throw ConfigError("--n must be at least 1");
  if (threads < 0) throw ConfigError("--threads must be nonnegative");
  oscillator.validate();
  spacecraft.validate();
  boundary.validate();
}

void apply_json(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"problem", "filter", "constant", "integrator", "solver", "schedule", "guess", "domain", "seed",
                  "n", "method", "threads", "out_dir", "oscillator", "spacecraft", "boundary", "units"},
                 "config");
  take(j, "problem", c.problem);
  if (j.contains("filter")) c.filter = parse_filter_kind(j.at("filter").get<std::string>());
  if (j.contains("constant")) c.constant = j.at("constant").get<double>();
  if (j.contains("integrator")) {
    const json& i = j.at("integrator");
    reject_unknown(i, {"abs_tol", "rel_tol", "initial_step", "max_steps"}, "integrator");
    take(i, "abs_tol", c.integ.abs_tol);
    take(i, "rel_tol", c.integ.rel_tol);
    take(i, "initial_step", c.integ.initial_step);
    take(i, "max_steps", c.integ.max_steps);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s,
                   {"method", "residual_tol", "max_iterations", "fd_step", "shrink", "min_step", "max_step_ratio",
                    "initial_radius", "stall_window"},
                   "solver");
    if (s.contains("method")) c.root.method = parse_root_method(s.at("method").get<std::string>());
    take(s, "residual_tol", c.root.residual_tol);
    take(s, "max_iterations", c.root.max_iterations);
    take(s, "fd_step", c.root.fd_step);
    take(s, "shrink", c.root.shrink);
    take(s, "min_step", c.root.min_step);
    take(s, "max_step_ratio", c.root.max_step_ratio);
    take(s, "initial_radius", c.root.initial_radius);
    take(s, "stall_window", c.root.stall_window);
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    reject_unknown(s, {"start", "floor", "factor", "max_retries", "perturbation_divisor"}, "schedule");
    take(s, "start", c.schedule.start);
    take(s, "floor", c.schedule.floor);
    take(s, "factor", c.schedule.factor);
    take(s, "max_retries", c.schedule.max_retries);
    take(s, "perturbation_divisor", c.schedule.perturbation_divisor);
  }
  if (j.contains("guess")) c.guess = json_vector(j.at("guess"));
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    reject_unknown(d, {"lower", "upper"}, "domain");
    c.domain = GuessDomain{json_vector(d.at("lower")), json_vector(d.at("upper"))};
  }
  take(j, "seed", c.seed);
  take(j, "n", c.n);
  if (j.contains("method")) c.method = parse_solve_method(j.at("method").get<std::string>());
  take(j, "threads", c.threads);
  take(j, "out_dir", c.out_dir);
  if (j.contains("oscillator")) {
    const json& o = j.at("oscillator");
    reject_unknown(o, {"x1_0", "x2_0", "x1_f", "x2_f"}, "oscillator");
    take(o, "x1_0", c.oscillator.x1_0);
    take(o, "x2_0", c.oscillator.x2_0);
    take(o, "x1_f", c.oscillator.x1_f);
    take(o, "x2_f", c.oscillator.x2_f);
  }
  if (j.contains("spacecraft")) {
    const json& s = j.at("spacecraft");
    reject_unknown(s, {"m0", "thrust", "isp", "g0", "mu"}, "spacecraft");
    take(s, "m0", c.spacecraft.m0);
    take(s, "thrust", c.spacecraft.thrust);
    take(s, "isp", c.spacecraft.isp);
    take(s, "g0", c.spacecraft.g0);
    take(s, "mu", c.spacecraft.mu);
  }
  if (j.contains("boundary")) {
    const json& b = j.at("boundary");
    reject_unknown(b, {"initial", "target", "tf_seconds"}, "boundary");
    if (b.contains("initial")) {
      const json& x = b.at("initial");
      reject_unknown(x, {"p", "f", "g", "h", "k", "L"}, "boundary.initial");
      take(x, "p", c.boundary.initial.p);
      take(x, "f", c.boundary.initial.f);
      take(x, "g", c.boundary.initial.g);
      take(x, "h", c.boundary.initial.h);
      take(x, "k", c.boundary.initial.k);
      take(x, "L", c.boundary.initial.L);
    }
    if (b.contains("target")) {
      const json& x = b.at("target");
      reject_unknown(x, {"p", "f", "g", "h", "k"}, "boundary.target");
      take(x, "p", c.boundary.p_f);
      take(x, "f", c.boundary.f_f);
      take(x, "g", c.boundary.g_f);
      take(x, "h", c.boundary.h_f);
      take(x, "k", c.boundary.k_f);
    }
    take(b, "tf_seconds", c.boundary.tf_seconds);
  }
  if (j.contains("units")) {
    const auto u = j.at("units").get<std::string>();
    if (u != "canonical" && u != "physical") throw ConfigError("units must be canonical or physical");
    c.canonical_units = u == "canonical";
  }
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j{
      {"problem", c.problem},
      {"filter", std::string(to_string(c.filter))},
      {"constant", c.smoothing_constant()},
      {"integrator",
       {{"abs_tol", c.integ.abs_tol},
        {"rel_tol", c.integ.rel_tol},
        {"initial_step", c.integ.initial_step},
        {"max_steps", c.integ.max_steps}}},
      {"solver",
       {{"method", std::string(to_string(c.root.method))},
        {"residual_tol", c.root.residual_tol},
        {"max_iterations", c.root.max_iterations},
        {"fd_step", c.root.fd_step},
        {"shrink", c.root.shrink},
        {"min_step", c.root.min_step},
        {"max_step_ratio", c.root.max_step_ratio},
        {"initial_radius", c.root.initial_radius},
        {"stall_window", c.root.stall_window}}},
      {"schedule",
       {{"start", c.schedule.start},
        {"floor", c.schedule.floor},
        {"factor", c.schedule.factor},
        {"max_retries", c.schedule.max_retries},
        {"perturbation_divisor", c.schedule.perturbation_divisor}}},
      {"seed", c.seed},
      {"n", c.n},
      {"method", std::string(to_string(c.method))},
      {"threads", c.threads},
      {"out_dir", c.out_dir},
      {"units", c.canonical_units ? "canonical" : "physical"}};
  if (c.guess) j["guess"] = io::vector_json(*c.guess);
  if (c.domain) j["domain"] = {{"lower", io::vector_json(c.domain->lower)}, {"upper", io::vector_json(c.domain->upper)}};
  if (c.problem == "oscillator") {
    j["oscillator"] = {{"x1_0", c.oscillator.x1_0}, {"x2_0", c.oscillator.x2_0},
                       {"x1_f", c.oscillator.x1_f}, {"x2_f", c.oscillator.x2_f}};
  } else {
    j["spacecraft"] = {{"m0", c.spacecraft.m0}, {"thrust", c.spacecraft.thrust}, {"isp", c.spacecraft.isp},
                       {"g0", c.spacecraft.g0}, {"mu", c.spacecraft.mu}};
    const auto& b = c.boundary;
    j["boundary"] = {{"initial",
                      {{"p", b.initial.p}, {"f", b.initial.f}, {"g", b.initial.g},
                       {"h", b.initial.h}, {"k", b.initial.k}, {"L", b.initial.L}}},
                     {"target", {{"p", b.p_f}, {"f", b.f_f}, {"g", b.g_f}, {"h", b.h_f}, {"k", b.k_f}}},
                     {"tf_seconds", b.tf_seconds}};
  }
  return j;
}

std::unique_ptr<IndirectProblem> make_problem(const RunConfig& config) {
  config.validate();
  if (config.problem == "oscillator") return std::make_unique<OscillatorProblem>(config.oscillator);
  return std::make_unique<LowThrustProblem>(
      config.spacecraft, config.boundary,
      config.canonical_units ? std::optional<UnitSystem>{} : std::optional<UnitSystem>{UnitSystem::physical()});
}

Vector parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) throw ConfigError("not a number list: '" + text + "'");
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError("empty number list");
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bang-bang optimal control by indirect shooting with smoothed controls"};
  app.require_subcommand(1);

  struct Flags {
    std::string config_path, problem, filter, guess, out_dir, method, solver, report;
    std::optional<double> delta, rho, abs_tol, rel_tol, solver_tol;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads, n, max_iter;
  } f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON config file; flags override it");
    sub->add_option("--problem", f.problem, "oscillator | gto-geo");
    sub->add_option("--filter", f.filter, "hard | l2 | tanh");
    sub->add_option("--delta", f.delta, "L2-norm smoothing constant");
    sub->add_option("--rho", f.rho, "tanh smoothing constant");
    sub->add_option("--guess", f.guess, "comma-separated shooting variable");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--out-dir", f.out_dir, "directory for output files");
    sub->add_option("--abs-tol", f.abs_tol, "integrator absolute tolerance");
    sub->add_option("--rel-tol", f.rel_tol, "integrator relative tolerance");
    sub->add_option("--solver-tol", f.solver_tol, "root-solver residual tolerance");
    sub->add_option("--solver", f.solver, "newton | dogleg");
    sub->add_option("--max-iter", f.max_iter, "root-solver iteration limit");
  };
  CLI::App* solve = app.add_subcommand("solve", "single shooting solve at one smoothing constant");
  CLI::App* cont = app.add_subcommand("continue", "continuation on the smoothing constant");
  CLI::App* mc = app.add_subcommand("montecarlo", "batch of solves from random guesses");
  CLI::App* exp = app.add_subcommand("export", "propagate a shooting variable and write the trajectory");
  for (CLI::App* sub : {solve, cont, mc, exp}) add_common(sub);
  mc->add_option("--n", f.n, "number of runs");
  mc->add_option("--method", f.method, "direct | continuation");
  mc->add_option("--threads", f.threads, "worker threads (0: all)");
  exp->add_option("--report", f.report, "report.json whose solution is exported");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  RunConfig config;
  try {
    json file = json::object();
    if (!f.config_path.empty()) file = json::parse(slurp(f.config_path));
    const std::string problem =
        !f.problem.empty() ? f.problem : file.is_object() ? file.value("problem", std::string("oscillator"))
                                                          : std::string("oscillator");
    const FilterKind filter = parse_filter_kind(
        !f.filter.empty() ? f.filter : file.is_object() ? file.value("filter", std::string("l2")) : "l2");
    config = RunConfig::defaults_for(problem, filter);
    apply_json(file, config);

    if (!f.problem.empty()) config.problem = f.problem;
    if (!f.filter.empty()) config.filter = parse_filter_kind(f.filter);
    if (f.delta && f.rho) throw ConfigError("--delta and --rho are mutually exclusive");
    if (f.delta) {
      if (config.filter != FilterKind::L2Norm) throw ConfigError("--delta applies to the l2 filter");
      config.constant = *f.delta;
    }
    if (f.rho) {
      if (config.filter != FilterKind::Tanh) throw ConfigError("--rho applies to the tanh filter");
      config.constant = *f.rho;
    }
    if (!f.guess.empty()) config.guess = parse_vector(f.guess);
    if (f.seed) config.seed = *f.seed;
    if (!f.out_dir.empty()) config.out_dir = f.out_dir;
    if (f.abs_tol) config.integ.abs_tol = *f.abs_tol;
    if (f.rel_tol) config.integ.rel_tol = *f.rel_tol;
    if (f.solver_tol) config.root.residual_tol = *f.solver_tol;
    if (!f.solver.empty()) config.root.method = parse_root_method(f.solver);
    if (f.max_iter) config.root.max_iterations = *f.max_iter;
    if (f.n) config.n = *f.n;
    if (!f.method.empty()) config.method = parse_solve_method(f.method);
    if (f.threads) config.threads = *f.threads;
    config.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*solve) return cmd_solve(config, out);
    if (*cont) return cmd_continue(config, out);
    if (*mc) return cmd_montecarlo(config, out);
    return cmd_export(config, f.report, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const EvaluationError& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  }
}

}  // namespace bangbang::cli
