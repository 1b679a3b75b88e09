#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arcflow/error.hpp"
#include "arcflow/study.hpp"

using namespace arcflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("arcflow_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json growth_config() {
  return Json::parse(R"({
    "space": {"kind": "euclidean", "dim": 1},
    "fields": {"grow": {"kind": "linear", "matrix": [1]}},
    "field": "grow",
    "initial": {"point": [1], "time": 0},
    "tol": 1e-3, "total_time": 0.5, "seed": 7,
    "oracle": {"kind": "exponential", "rate": 1},
    "checks": {"order_range": [0.8, 1.2], "max_defect": 0.05}
  })");
}

Json translation_sum_config() {
  return Json::parse(R"({
    "space": {"kind": "euclidean", "dim": 1},
    "fields": {"one": {"kind": "constant_velocity", "velocity": [1]},
               "two": {"kind": "constant_velocity", "velocity": [2]}},
    "sum": ["one", "two"],
    "initial": {"point": [0]},
    "total_time": 1.0
  })");
}

}  // namespace

TEST_CASE("parse_config: valid document and overrides") {
  StudyOverrides o;
  o.seed = 99;
  o.tol = 1e-4;
  o.n_max = 12;
  const StudyConfig cfg = parse_config(growth_config(), o);
  CHECK(cfg.solve.sampling.seed == 99);
  CHECK(cfg.solve.tol == 1e-4);
  CHECK(cfg.solve.n_max == 12);
  CHECK(cfg.field == "grow");
  CHECK(cfg.solve.total_time == 0.5);
}

TEST_CASE("parse_config: errors are ConfigError") {
  Json bad = growth_config();
  bad["field"] = "missing";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = growth_config();
  bad["tol"] = 0.0;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = growth_config();
  bad["space"]["kind"] = "torus";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = growth_config();
  bad.erase("initial");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = growth_config();
  bad["fields"]["grow"]["kind"] = "nope";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::array()), ConfigError);
}

TEST_CASE("run_study: integrate on a constant field writes a constant trajectory") {
  const Json cfg = Json::parse(R"({
    "space": {"kind": "euclidean", "dim": 2},
    "fields": {"still": {"kind": "constant_velocity", "velocity": [0]}},
    "field": "still", "initial": {"point": [1, -2]}, "total_time": 1.0
  })");
  const fs::path out = scratch("constant");
  const StudyResult r = run_study("integrate", cfg, out);
  CHECK(r.exit_code == kStudyOk);
  std::istringstream csv(slurp(out / "curve.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "s,x0,x1");
  int rows = 0;
  while (std::getline(csv, line)) {
    CHECK(line.substr(line.find(',')) == ",1,-2");
    ++rows;
  }
  CHECK(rows >= 2);
}

TEST_CASE("run_study: convergence-study for x' = x has order in [0.8, 1.2]") {
  const fs::path out = scratch("convergence");
  const StudyResult r = run_study("convergence-study", growth_config(), out);
  CHECK(r.exit_code == kStudyOk);
  std::istringstream csv(slurp(out / "convergence.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "n,nodes,sup_gap,observed_order,oracle_error,oracle_order");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    if (rows > 0) {
      const double order = std::stod(cols[3]);
      CHECK(order >= 0.8);
      CHECK(order <= 1.2);
    }
    ++rows;
  }
  CHECK(rows == 7);
}

TEST_CASE("run_study: integrate-sum of translations has endpoint column 3 s") {
  const fs::path out = scratch("sum");
  const StudyResult r = run_study("integrate-sum", translation_sum_config(), out);
  CHECK(r.exit_code == kStudyOk);
  std::istringstream csv(slurp(out / "curve.csv"));
  std::string line;
  std::getline(csv, line);
  // Rows inside an alternating cycle are off the line by at most one step.
  double s = 0.0;
  double x = 0.0;
  while (std::getline(csv, line)) {
    s = std::stod(line.substr(0, line.find(',')));
    x = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::fabs(x - 3 * s) <= 1e-3);
  }
  CHECK(s == 1.0);
  CHECK(x == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("run_study: exit codes") {
  CHECK(run_study("warp", growth_config(), scratch("x")).exit_code == kStudyConfigError);
  Json bad = growth_config();
  bad["field"] = "nope";
  CHECK(run_study("integrate", bad, scratch("bad")).exit_code == kStudyConfigError);

  Json tight = growth_config();
  tight["tol"] = 1e-9;
  tight["n_max"] = 6;
  const fs::path out = scratch("tight");
  const StudyResult t = run_study("integrate", tight, out);
  CHECK(t.exit_code == kStudyToleranceFailure);
  CHECK(fs::exists(out / "curve.csv"));
  CHECK(fs::exists(out / "solve_report.json"));

  Json failing = growth_config();
  failing["checks"] = Json::parse(R"({"endpoint": {"point": [3.0], "tol": 1e-3}})");
  CHECK(run_study("integrate", failing, scratch("failing")).exit_code == kStudyCheckFailure);
}

TEST_CASE("run_study: identical config and seed give byte-identical artifacts") {
  Json cfg = growth_config();
  cfg["sum"] = Json::array({"grow", "grow"});
  for (const std::string cmd : {"integrate", "estimate-conditions", "convergence-study"}) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    run_study(cmd, cfg, a);
    run_study(cmd, cfg, b);
    for (const auto& entry : fs::directory_iterator(a)) {
      CAPTURE(entry.path().filename().string());
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
  }
}

TEST_CASE("run_study: the seed is recorded in every JSON artifact") {
  const fs::path out = scratch("seed");
  StudyOverrides o;
  o.seed = 1234;
  run_study("integrate", growth_config(), out, o);
  const Json doc = Json::parse(slurp(out / "solve_report.json"));
  CHECK(doc["seed"] == 1234);
}

TEST_CASE("run_study: dependence, lemma audit and associativity commands") {
  Json dep = growth_config();
  dep["initial_b"] = Json::parse(R"({"point": [1.1], "time": 0})");
  dep["K_A"] = 1.0;
  const fs::path d = scratch("dep");
  CHECK(run_study("dependence-study", dep, d).exit_code == kStudyOk);
  CHECK(slurp(d / "dependence.csv").rfind("s,lhs,rhs,pass\n", 0) == 0);

  Json audit = growth_config();
  audit["audit_samples"] = 200;
  CHECK(run_study("lemma-audit", audit, scratch("audit")).exit_code == kStudyOk);

  Json triple = Json::parse(R"({
    "space": {"kind": "euclidean", "dim": 1},
    "fields": {"a": {"kind": "linear", "matrix": [0.5]},
               "b": {"kind": "linear", "matrix": [-0.3]},
               "c": {"kind": "constant_velocity", "velocity": [0.2]}},
    "triple": ["a", "b", "c"], "sum": ["a", "b"],
    "initial": {"point": [1]}, "total_time": 0.5
  })");
  const fs::path t = scratch("triple");
  CHECK(run_study("associativity-study", triple, t).exit_code == kStudyOk);
  CHECK(fs::exists(t / "curve_left.csv"));
  CHECK(fs::exists(t / "associativity.json"));
}
