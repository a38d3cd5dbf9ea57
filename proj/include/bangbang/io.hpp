#pragma once

#include "bangbang/continuation.hpp"
#include "bangbang/harness.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bangbang::io {

using Json = nlohmann::ordered_json;

/// Trajectory table as written to trajectory.csv.
struct TrajectoryTable {
  std::vector<std::string> columns;  // t, <state names...>, u, S
  std::vector<std::vector<double>> rows;

  bool operator==(const TrajectoryTable&) const = default;
};

TrajectoryTable make_table(const Trajectory& traj, const std::vector<std::string>& names);

/// CSV with a header row; numbers use 17 significant digits so the file
/// round-trips bit-exactly.
void write_csv(std::ostream& out, const TrajectoryTable& table);
TrajectoryTable read_csv(std::istream& in);

/// Non-finite doubles are written as null and read back as +inf.
Json number(double x);
double read_number(const Json& j);
Json vector_json(const Vector& v);
Vector read_vector(const Json& j);

Json to_json(const SolveReport& report);
SolveReport solve_report_from_json(const Json& j);

Json to_json(const ContinuationReport& report);
ContinuationReport continuation_report_from_json(const Json& j);

/// Deterministic fields only; wall time lives in a separate timings file.
Json to_json(const RunRecord& record);
RunRecord run_record_from_json(const Json& j);

Json to_json(const MonteCarloStats& stats);
MonteCarloStats stats_from_json(const Json& j);

/// One compact JSON document per line.
void write_jsonl(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_jsonl(std::istream& in);

/// Spreadsheet mirror of the records: index, converged, cost, residual,
/// iterations, continuation_steps, then one column per guess component and
/// per extras key.
void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// Pretty-printed JSON followed by a newline.
std::string dump(const Json& j);

}  // namespace bangbang::io
