#include "bangbang/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bangbang::io {

namespace {

std::string format17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

Json optional_number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

TrajectoryTable make_table(const Trajectory& traj, const std::vector<std::string>& names) {
  TrajectoryTable table;
  table.columns.reserve(names.size() + 3);
  table.columns.push_back("t");
  table.columns.insert(table.columns.end(), names.begin(), names.end());
  table.columns.push_back("u");
  table.columns.push_back("S");
  const bool annotated = traj.control.size() == traj.size() && traj.switching.size() == traj.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.states[i].size() != static_cast<Eigen::Index>(names.size())) {
      throw std::invalid_argument("state dimension does not match the column names");
    }
    std::vector<double> row;
    row.reserve(table.columns.size());
    row.push_back(traj.times[i]);
    for (Eigen::Index k = 0; k < traj.states[i].size(); ++k) row.push_back(traj.states[i][k]);
    row.push_back(annotated ? traj.control[i] : nan);
    row.push_back(annotated ? traj.switching[i] : nan);
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(std::ostream& out, const TrajectoryTable& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format17(row[c]);
    out << '\n';
  }
}

TrajectoryTable read_csv(std::istream& in) {
  TrajectoryTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file");
  strip_cr(line);
  table.columns = split(line, ',');
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != table.columns.size()) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(table.columns.size()) + " fields, got " +
                               std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || cell.empty()) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double read_number(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

Json vector_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

Vector read_vector(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = read_number(j[i]);
  return v;
}

Json to_json(const SolveReport& r) {
  return Json{{"converged", r.converged},         {"solution", vector_json(r.solution)},
              {"residual_norm", number(r.residual_norm)}, {"iterations", r.iterations},
              {"evaluations", r.evaluations},     {"wall_time", number(r.wall_time)},
              {"message", r.message}};
}

SolveReport solve_report_from_json(const Json& j) {
  SolveReport r;
  r.converged = j.at("converged").get<bool>();
  r.solution = read_vector(j.at("solution"));
  r.residual_norm = read_number(j.at("residual_norm"));
  r.iterations = j.at("iterations").get<int>();
  r.evaluations = j.value("evaluations", 0);
  r.wall_time = j.contains("wall_time") ? read_number(j.at("wall_time")) : 0.0;
  r.message = j.value("message", "");
  return r;
}

Json to_json(const ContinuationReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    steps.push_back(Json{{"constant", number(s.constant)},
                         {"attempt", s.attempt},
                         {"guess", vector_json(s.guess)},
                         {"report", to_json(s.report)}});
  }
  return Json{{"converged", r.converged},
              {"filter", std::string(to_string(r.filter))},
              {"floor", number(r.floor)},
              {"final_constant", number(r.final_constant)},
              {"final_solution", vector_json(r.final_solution)},
              {"levels_converged", r.levels_converged()},
              {"total_wall_time", number(r.total_wall_time)},
              {"message", r.message},
              {"steps", std::move(steps)}};
}

ContinuationReport continuation_report_from_json(const Json& j) {
  ContinuationReport r;
  r.converged = j.at("converged").get<bool>();
  r.filter = parse_filter_kind(j.at("filter").get<std::string>());
  r.floor = read_number(j.at("floor"));
  r.final_constant = read_number(j.at("final_constant"));
  r.final_solution = read_vector(j.at("final_solution"));
  r.total_wall_time = read_number(j.at("total_wall_time"));
  r.message = j.value("message", "");
  for (const auto& s : j.at("steps")) {
    r.steps.push_back(ContinuationStep{read_number(s.at("constant")), s.at("attempt").get<int>(),
                                       read_vector(s.at("guess")), solve_report_from_json(s.at("report"))});
  }
  return r;
}

Json to_json(const RunRecord& r) {
  Json extras = Json::object();
  for (const auto& [k, v] : r.extras) extras[k] = number(v);
  return Json{{"index", r.index},
              {"guess", vector_json(r.guess)},
              {"converged", r.converged},
              {"solution", vector_json(r.solution)},
              {"cost", optional_number(r.cost)},
              {"residual_norm", number(r.residual_norm)},
              {"iterations", r.iterations},
              {"continuation_steps", r.continuation_steps},
              {"extras", std::move(extras)},
              {"message", r.message}};
}

RunRecord run_record_from_json(const Json& j) {
  RunRecord r;
  r.index = j.at("index").get<int>();
  r.guess = read_vector(j.at("guess"));
  r.converged = j.at("converged").get<bool>();
  r.solution = read_vector(j.at("solution"));
  r.cost = read_optional(j, "cost");
  r.residual_norm = read_number(j.at("residual_norm"));
  r.iterations = j.at("iterations").get<int>();
  r.continuation_steps = j.value("continuation_steps", 0);
  for (const auto& [k, v] : j.at("extras").items()) r.extras[k] = read_number(v);
  r.message = j.value("message", "");
  return r;
}

Json to_json(const MonteCarloStats& s) {
  Json extras = Json::object();
  for (const auto& [k, range] : s.extras_range) {
    extras[k] = Json::array({number(range.first), number(range.second)});
  }
  return Json{{"n_runs", s.n_runs},
              {"n_converged", s.n_converged},
              {"convergence_fraction", number(s.convergence_fraction)},
              {"averaging", "cost and residual means are over converged runs only"},
              {"cost_mean", optional_number(s.cost_mean)},
              {"cost_min", optional_number(s.cost_min)},
              {"cost_max", optional_number(s.cost_max)},
              {"residual_mean", optional_number(s.residual_mean)},
              {"wall_time_mean", number(s.wall_time_mean)},
              {"extras_range", std::move(extras)}};
}

MonteCarloStats stats_from_json(const Json& j) {
  MonteCarloStats s;
  s.n_runs = j.at("n_runs").get<int>();
  s.n_converged = j.at("n_converged").get<int>();
  s.convergence_fraction = read_number(j.at("convergence_fraction"));
  s.cost_mean = read_optional(j, "cost_mean");
  s.cost_min = read_optional(j, "cost_min");
  s.cost_max = read_optional(j, "cost_max");
  s.residual_mean = read_optional(j, "residual_mean");
  s.wall_time_mean = read_number(j.at("wall_time_mean"));
  for (const auto& [k, v] : j.at("extras_range").items()) {
    s.extras_range[k] = {read_number(v.at(0)), read_number(v.at(1))};
  }
  return s;
}

void write_jsonl(std::ostream& out, const std::vector<RunRecord>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<RunRecord> read_jsonl(std::istream& in) {
  std::vector<RunRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    try {
      out.push_back(run_record_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw std::runtime_error("records line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  Eigen::Index guess_dim = 0;
  std::vector<std::string> extra_keys;
  for (const auto& r : records) {
    guess_dim = std::max(guess_dim, r.guess.size());
    for (const auto& kv : r.extras) {
      if (std::find(extra_keys.begin(), extra_keys.end(), kv.first) == extra_keys.end()) {
        extra_keys.push_back(kv.first);
      }
    }
  }
  std::sort(extra_keys.begin(), extra_keys.end());
  out << "index,converged,cost,residual_norm,iterations,continuation_steps";
  for (Eigen::Index i = 0; i < guess_dim; ++i) out << ",guess" << i;
  for (const auto& k : extra_keys) out << ',' << k;
  out << '\n';
  for (const auto& r : records) {
    out << r.index << ',' << (r.converged ? 1 : 0) << ',' << (r.cost ? format17(*r.cost) : "") << ','
        << format17(r.residual_norm) << ',' << r.iterations << ',' << r.continuation_steps;
    for (Eigen::Index i = 0; i < guess_dim; ++i) out << ',' << (i < r.guess.size() ? format17(r.guess[i]) : "");
    for (const auto& k : extra_keys) {
      auto it = r.extras.find(k);
      out << ',' << (it != r.extras.end() ? format17(it->second) : "");
    }
    out << '\n';
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace bangbang::io
