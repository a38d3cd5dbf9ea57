#include "doctest.h"

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bangbang;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bangbang");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bangbang_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("oscillator solve succeeds and writes artifacts") {
    const fs::path dir = scratch("solve");
    const Result r = run({"solve", "--guess", "0.5,0.7,2.2", "--out-dir", dir.string()});
    CHECK(r.code == cli::kSuccess);
    CHECK(r.out.find("converged") == 0);
    REQUIRE(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "trajectory.csv"));
    const auto doc = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(doc.at("cost").get<double>() == doctest::Approx(2.4980916).epsilon(1e-5));

    const fs::path exp = scratch("export");
    const Result e = run({"export", "--report", (dir / "report.json").string(), "--out-dir", exp.string()});
    CHECK(e.code == cli::kSuccess);
    CHECK(slurp(exp / "trajectory.csv") == slurp(dir / "trajectory.csv"));
  }

  TEST_CASE("usage errors exit with 2") {
    CHECK(run({"solve", "--problem", "pendulum"}).code == cli::kUsage);
    CHECK(run({"montecarlo", "--n", "0"}).code == cli::kUsage);
    CHECK(run({"solve", "--filter", "median"}).code == cli::kUsage);
    CHECK(run({"solve", "--guess", "1,2"}).code == cli::kUsage);
    CHECK(run({"solve", "--delta", "1e-3", "--filter", "tanh"}).code == cli::kUsage);
    CHECK(run({"solve", "--bogus"}).code == cli::kUsage);
    CHECK(run({}).code == cli::kUsage);

    const fs::path dir = scratch("config");
    fs::create_directories(dir);
    std::ofstream(dir / "floor.json") << R"({"schedule": {"start": 1e-3, "floor": 1e-2}})";
    CHECK(run({"continue", "--config", (dir / "floor.json").string(), "--out-dir", dir.string()}).code ==
          cli::kUsage);
    std::ofstream(dir / "typo.json") << R"({"integrater": {}})";
    const Result typo = run({"solve", "--config", (dir / "typo.json").string()});
    CHECK(typo.code == cli::kUsage);
    CHECK(typo.err.find("integrater") != std::string::npos);
  }

  TEST_CASE("non-convergence exits with 1") {
    const fs::path dir = scratch("fail");
    const Result r = run({"solve", "--guess", "0.9,0.1,1.0", "--max-iter", "1", "--out-dir", dir.string()});
    CHECK(r.code == cli::kNotConverged);
    CHECK(fs::exists(dir / "report.json"));
    CHECK_FALSE(fs::exists(dir / "trajectory.csv"));

    const fs::path lt = scratch("lt_fail");
    const Result g = run({"solve", "--problem", "gto-geo", "--guess", "0,0,0,0,0,0,0", "--delta", "1",
                          "--max-iter", "1", "--out-dir", lt.string()});
    CHECK(g.code == cli::kNotConverged);
  }

  TEST_CASE("config file with flag override") {
    const fs::path dir = scratch("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "run.json") << R"({"problem": "oscillator", "filter": "tanh", "constant": 1e-3,
                                          "integrator": {"abs_tol": 1e-10, "rel_tol": 1e-10}})";
    const Result r = run({"solve", "--config", (dir / "run.json").string(), "--rho", "1e-4", "--guess",
                          "0.6,0.8,2.5", "--out-dir", dir.string()});
    CHECK(r.code == cli::kSuccess);
    const auto doc = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(doc.at("filter") == "tanh");
    CHECK(doc.at("constant").get<double>() == 1e-4);
    CHECK(doc.at("config").at("integrator").at("abs_tol").get<double>() == 1e-10);
  }

  TEST_CASE("continuation history lists every constant") {
    const fs::path dir = scratch("continue");
    const Result r = run({"continue", "--guess", "0.5,0.7,2.2", "--seed", "4", "--out-dir", dir.string()});
    CHECK(r.code == cli::kSuccess);
    const auto hist = nlohmann::json::parse(slurp(dir / "history.json"));
    std::vector<double> constants;
    for (const auto& s : hist.at("steps")) {
      if (s.at("attempt") == 0) constants.push_back(s.at("constant").get<double>());
    }
    REQUIRE(constants.size() == 9);
    for (std::size_t i = 0; i < constants.size(); ++i) {
      CHECK(constants[i] == doctest::Approx(std::pow(10.0, -static_cast<double>(i))).epsilon(1e-9));
    }
    CHECK(hist.at("converged") == true);
  }

  TEST_CASE("monte carlo output is byte-identical for one seed") {
    const fs::path a = scratch("mc_a"), b = scratch("mc_b");
    const Result ra = run({"montecarlo", "--n", "12", "--seed", "3", "--out-dir", a.string()});
    const Result rb =
        run({"montecarlo", "--n", "12", "--seed", "3", "--threads", "1", "--out-dir", b.string()});
    CHECK(ra.code == cli::kSuccess);
    CHECK(rb.code == cli::kSuccess);
    CHECK(slurp(a / "records.jsonl") == slurp(b / "records.jsonl"));
    CHECK(slurp(a / "records.csv") == slurp(b / "records.csv"));
    CHECK_FALSE(slurp(a / "records.jsonl").empty());
    const auto stats = nlohmann::json::parse(slurp(a / "stats.json"));
    CHECK(stats.at("n_runs") == 12);
    CHECK(fs::exists(a / "timings.json"));
  }

  TEST_CASE("parse_vector") {
    CHECK(cli::parse_vector("1, 2.5,-3e-2") == (Vector(3) << 1, 2.5, -3e-2).finished());
    CHECK_THROWS(cli::parse_vector("1,,2"));
    CHECK_THROWS(cli::parse_vector("x"));
  }
}
