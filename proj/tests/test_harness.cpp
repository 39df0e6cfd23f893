#include <doctest.h>

#include <string>

#include "grpavg/error.hpp"
#include "grpavg/harness/config.hpp"
#include "grpavg/harness/experiments.hpp"
#include "grpavg/harness/report.hpp"
#include "grpavg/harness/targets.hpp"

using namespace grpavg;
using namespace grpavg::harness;

namespace {

std::uint64_t fnv_oracle(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return h;
}

std::uint64_t splitmix_oracle(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

ExperimentReport sample_report() {
  ExperimentReport r;
  r.name = "exp";
  r.inputs = {{"n", 3}};
  r.metric("value", 0.1);
  r.metric("unbounded", std::numeric_limits<double>::infinity());
  r.check_close("close", "trace.P", 1.0, 1.0 + 1e-13, 1e-12);
  r.check_le("le", "", 2.0, 1.0, 0.5);
  r.curves.push_back({"a", "1", {2.0, 1.0, 0.5}});
  r.curves.push_back({"b", "1", {2.0, 0.25}});
  return r;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("minimal config gets defaults") {
  const ExperimentConfig c =
      parse_config_text(R"({"schema_version": 1, "name": "m", "model": {"name": "dhn", "n": 8}})");
  REQUIRE(c.model.has_value());
  const auto& m = std::get<NamedModelSpec>(*c.model);
  CHECK(m.name == "dhn");
  CHECK(m.params.n == 8);
  CHECK(m.params.beta == 1.0);
  CHECK(c.diagnostics == std::vector<std::string>{"stationarity", "spectral"});
  CHECK(c.seeds == std::vector<std::uint64_t>{0});
  CHECK(c.mixing.norm == Norm::L1);
  CHECK(c.mixing.eps == std::vector<double>{0.25});
}

TEST_CASE("inline rows must be stochastic") {
  const std::string msg = error_of(
      R"({"schema_version": 1, "name": "m", "model": {"matrix": [[0.5, 0.5], [0.5, 0.49]]}})");
  CHECK(msg.find("row 1") != std::string::npos);
  CHECK(parse_config_text(R"({"schema_version": 1, "name": "m", "model": {"matrix": [[0.5, 0.5], [0.25, 0.75]]}})")
            .model.has_value());
}

TEST_CASE("schema errors") {
  CHECK(error_of(R"({"schema_version": 1, "name": "m", "model": {"name": "dhn", "bogus": 1}})").find("model.bogus") !=
        std::string::npos);
  CHECK(error_of(R"({"name": "m", "model": {"name": "dhn"}})").find("schema_version") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 2, "name": "m", "model": {"name": "dhn"}})").find("unsupported") !=
        std::string::npos);
  CHECK_FALSE(error_of(R"({"schema_version": 1, "name": "m"})").empty());
  CHECK_FALSE(error_of(R"({"schema_version": 1, "name": "m", "experiment": "trace-2state",
                           "model": {"name": "dhn"}})").empty());
  CHECK_FALSE(error_of(R"({"schema_version": 1, "name": "m", "model": {"name": "dhn"},
                           "nu": "orbit"})").empty());
  CHECK(error_of(R"({"schema_version": 1, "name": "m", "experiment": "trace-2state", "params": {"zzz": 1}})")
            .find("params.zzz") != std::string::npos);
}

TEST_CASE("parse errors carry a position") {
  const std::string text = "{\n  \"schema_version\": 1,\n  \"name\": ,\n}";
  try {
    parse_config_text(text);
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
  }
}

TEST_CASE("canonical form round trips") {
  const ExperimentConfig c = parse_config_text(R"({"schema_version": 1, "name": "rt",
      "model": {"name": "vshape", "n": 3, "beta": 2},
      "group": {"name": "flip", "n": 3}, "nu": "orbit",
      "diagnostics": ["spectral", "mixing"], "seeds": [4, 5],
      "mixing": {"norm": "inf", "eps": [0.5, 0.125], "t_max": 500}})");
  const std::string text = emit_config(c);
  const ExperimentConfig back = parse_config_text(text);
  CHECK(back == c);
  CHECK(emit_config(back) == text);
  const ExperimentConfig e =
      parse_config_text(R"({"schema_version": 1, "name": "e", "experiment": "trace-2state", "params": {"a": 0.2}})");
  CHECK(e.params.at("a") == 0.2);
  CHECK(parse_config_text(emit_config(e)) == e);
}

TEST_CASE("check semantics") {
  ExperimentReport r;
  CHECK(r.check_le("eq", "", 1.0, 1.0));
  CHECK(r.check_ge("within", "", 0.9, 1.0, 0.1 + 1e-15));
  CHECK_FALSE(r.check_close("far", "", 1.0, 2.0, 0.5));
  CHECK(r.checks.back().margin == doctest::Approx(-0.5));
  CHECK(r.checks.back().tolerance == 0.5);
  CHECK_FALSE(r.passed());
}

TEST_CASE("csv output") {
  CHECK(render({}, Format::csv) == "experiment,kind,name,target,relation,lhs,rhs,tolerance,margin,pass\n");
  const std::string csv = render({sample_report()}, Format::csv);
  CHECK(csv.find("exp,metric,value,,,0.1,,,,\n") != std::string::npos);
  CHECK(csv.find("exp,metric,unbounded,,,inf,,,,\n") != std::string::npos);
  CHECK(csv.find("exp,check,le,,<=,2,1,0.5,-0.5,false\n") != std::string::npos);
}

TEST_CASE("plot-data output") {
  const std::string plot = render({sample_report()}, Format::plot_data);
  CHECK(plot == "exp/a:t,exp/a:d_1,exp/b:t,exp/b:d_1\n0,2,0,2\n1,1,1,0.25\n2,0.5,,\n");
}

TEST_CASE("json output round trips byte for byte") {
  const std::string text = render({sample_report()}, Format::json);
  const auto back = parse_reports_json(text);
  REQUIRE(back.size() == 1);
  CHECK(back.front() == sample_report());
  CHECK(render(back, Format::json) == text);
  CHECK(text.find("wall_time_ms") == std::string::npos);
  CHECK(render(back, Format::json, true).find("wall_time_ms") != std::string::npos);
}

TEST_CASE("seed splitting") {
  for (std::uint64_t root : {0ull, 1ull, 123456789ull})
    for (const std::string name : {"vshape", "random-batteries", ""})
      CHECK(split_seed(root, name) == splitmix_oracle(root ^ fnv_oracle(name)));
  CHECK(split_seed(0, "vshape") != split_seed(0, "dhn-counterexample"));
}

TEST_CASE("runs are deterministic and independent of threads") {
  RunOptions o;
  o.seed = 7;
  o.params = {{"instances", 40}};
  const std::string a = render({run_experiment("random-batteries", o)}, Format::json);
  const std::string b = render({run_experiment("random-batteries", o)}, Format::json);
  CHECK(a == b);
  o.params = nlohmann::json::object();
  const std::vector<std::string> names{"trace-2state", "asympvar-3state", "pt-check", "uniform-shift"};
  RunOptions serial = o, parallel = o;
  parallel.threads = 4;
  CHECK(render(run_many(names, serial), Format::json) == render(run_many(names, parallel), Format::json));
}

TEST_CASE("overrides are validated") {
  CHECK_THROWS_AS(run_experiment("no-such-experiment"), ConfigError);
  RunOptions o;
  o.params = {{"zzz", 1}};
  CHECK_THROWS_AS(run_experiment("trace-2state", o), ConfigError);
  o.params = {{"a", "text"}};
  CHECK_THROWS_AS(run_experiment("trace-2state", o), ConfigError);
  o.params = {{"a", 0.7}};
  const ExperimentReport r = run_experiment("trace-2state", o);
  CHECK(r.error.has_value());
  CHECK_FALSE(r.passed());
}

TEST_CASE("every target is covered by a full run") {
  std::vector<std::string> names;
  for (const ExperimentInfo& e : registry()) names.push_back(e.name);
  RunOptions o;
  o.threads = 4;
  const auto reports = run_many(names, o);
  for (const ExperimentReport& r : reports) {
    CHECK_MESSAGE(r.passed(), r.name);
    for (const Check& c : r.checks)
      if (!c.target.empty()) CHECK_NOTHROW(target(c.target));
  }
  for (const CoverageRow& row : coverage(reports)) CHECK_MESSAGE(row.covered, row.target);
  CHECK_THROWS_AS(target("no.such.target"), DomainError);
}

TEST_CASE("model configs run the requested diagnostics") {
  const ExperimentConfig c = parse_config_text(R"({"schema_version": 1, "name": "custom",
      "model": {"name": "vshape", "n": 3, "beta": 1}, "group": {"name": "flip", "n": 3}, "nu": "independent",
      "diagnostics": ["stationarity", "spectral", "average", "cheeger", "mixing", "isotropy", "invariance"],
      "seeds": [0, 1], "mixing": {"eps": [0.25], "t_max": 1000}})");
  const auto reports = run_config(c);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].passed());
  CHECK_FALSE(reports[0].curves.empty());
  CHECK_FALSE(reports[0].metrics.empty());
}

}
