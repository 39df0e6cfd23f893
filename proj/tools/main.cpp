// grpavg command-line runner.
//
// Exit codes: 0 every check passed, 1 some check failed, 2 infrastructure
// error (bad input, unwritable output, or an experiment that could not run).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "grpavg/error.hpp"
#include "grpavg/harness/config.hpp"
#include "grpavg/harness/experiments.hpp"
#include "grpavg/harness/report.hpp"
#include "grpavg/harness/targets.hpp"

namespace fs = std::filesystem;
using namespace grpavg::harness;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_infra = 2;

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out_dir;
};

std::string extension(Format f) {
  switch (f) {
  case Format::json: return ".json";
  case Format::csv: return ".csv";
  case Format::plot_data: return ".plot.csv";
  }
  return "";
}

void write_output(const std::string& text, const Globals& g, const std::string& file_name) {
  if (g.out_dir.empty()) {
    std::cout << text;
    return;
  }
  std::error_code ec;
  fs::create_directories(g.out_dir, ec);
  const fs::path path = fs::path(g.out_dir) / file_name;
  std::ofstream os(path, std::ios::binary);
  if (!os || !(os << text)) throw grpavg::Error("cannot write '" + path.string() + "'");
  std::cerr << "wrote " << path.string() << "\n";
}

int summarize(const std::vector<ExperimentReport>& reports) {
  int code = exit_pass;
  for (const ExperimentReport& r : reports) {
    if (r.error) {
      std::cerr << "ERROR " << r.name << ": " << *r.error << "\n";
      code = exit_infra;
      continue;
    }
    std::size_t failed = 0;
    for (const Check& c : r.checks) {
      if (c.pass) continue;
      ++failed;
      std::cerr << "  violated: " << c.name << " [" << (c.target.empty() ? "-" : c.target) << "] lhs="
                << format_number(c.lhs) << " " << c.relation << " rhs=" << format_number(c.rhs)
                << " tol=" << format_number(c.tolerance) << " margin=" << format_number(c.margin) << "\n";
    }
    std::cerr << (failed ? "FAIL " : "PASS ") << r.name << " (" << r.checks.size() - failed << "/" << r.checks.size()
              << " checks)\n";
    if (failed && code == exit_pass) code = exit_fail;
  }
  return code;
}

nlohmann::json parse_overrides(const std::vector<std::string>& sets) {
  nlohmann::json out = nlohmann::json::object();
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    nlohmann::json v = nlohmann::json::parse(value, nullptr, false);
    out[key] = v.is_discarded() ? nlohmann::json(value) : v;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw grpavg::Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> all_names() {
  std::vector<std::string> names;
  for (const ExperimentInfo& e : registry()) names.push_back(e.name);
  return names;
}

std::string coverage_text(const std::vector<CoverageRow>& rows, bool csv) {
  std::ostringstream os;
  if (csv) os << "target,experiment,source,covered,checks\n";
  std::size_t covered = 0;
  for (const CoverageRow& r : rows) {
    covered += r.covered;
    if (csv) {
      os << r.target << "," << r.experiment << "," << r.source << "," << (r.covered ? "yes" : "no") << ","
         << r.checks.size() << "\n";
    } else {
      os << (r.covered ? "[x] " : "[ ] ") << r.target << "  (" << r.experiment << ", " << r.source << ", "
         << r.checks.size() << " checks)  " << r.statement << "\n";
    }
  }
  if (!csv) os << covered << "/" << rows.size() << " targets covered\n";
  return os.str();
}

} // namespace

int main(int argc, char** argv) {
  Globals g;
  if (const char* t = std::getenv("GRPAVG_THREADS")) g.threads = static_cast<std::size_t>(std::strtoull(t, nullptr, 10));
  if (const char* o = std::getenv("GRPAVG_OUT_DIR")) g.out_dir = o;
  if (g.threads == 0) g.threads = 1;

  CLI::App app{"Group-averaged Markov chain experiments"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", g.seed, "Root seed; per-experiment seeds are derived from it")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (env GRPAVG_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_dir, "Output directory (env GRPAVG_OUT_DIR); stdout when empty");

  auto* run = app.add_subcommand("run", "Run registered experiments or a config file");
  std::vector<std::string> names;
  std::string config_path, run_format = "json";
  std::vector<std::string> sets;
  bool run_all = false, timing = false;
  run->add_option("names", names, "Experiment names");
  run->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  run->add_flag("--all", run_all, "Run every registered experiment");
  run->add_option("--format", run_format, "json, csv or plot-data")->check(CLI::IsMember({"json", "csv", "plot-data"}));
  run->add_option("--set", sets, "Parameter override key=value (value is JSON)");
  run->add_flag("--timing", timing, "Include wall time in json output");

  auto* list = app.add_subcommand("list", "List experiments (or targets)");
  bool list_targets = false;
  list->add_flag("--targets", list_targets, "List the constants table instead");

  auto* cov = app.add_subcommand("coverage", "Traceability of constants-table targets to checks");
  std::string cov_from, cov_format = "text";
  cov->add_option("--from", cov_from, "Saved json report; runs every experiment when omitted")->check(CLI::ExistingFile);
  cov->add_option("--format", cov_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  auto* rep = app.add_subcommand("report", "Convert a saved json report");
  std::string rep_in, rep_format = "json";
  rep->add_option("--in", rep_in, "Saved json report")->required()->check(CLI::ExistingFile);
  rep->add_option("--format", rep_format, "json, csv or plot-data")->check(CLI::IsMember({"json", "csv", "plot-data"}));

  auto* val = app.add_subcommand("validate", "Parse a config and print its canonical form");
  std::string val_path;
  val->add_option("config", val_path, "Config file")->required();

  app.fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_pass : exit_infra;
  }

  try {
    if (*run) {
      if (config_path.empty() == (names.empty() && !run_all))
        throw ConfigError("run needs experiment names, --all, or --config (exactly one)");
      if (!config_path.empty() && !sets.empty()) throw ConfigError("--set applies to named experiments only");
      std::vector<ExperimentReport> reports;
      std::string stem;
      if (!config_path.empty()) {
        const ExperimentConfig c = parse_config(config_path);
        reports = run_config(c, g.threads);
        stem = c.name;
      } else {
        if (run_all) names = all_names();
        RunOptions o;
        o.seed = g.seed;
        o.threads = g.threads;
        o.params = parse_overrides(sets);
        if (!o.params.empty() && names.size() != 1) throw ConfigError("--set needs exactly one experiment");
        reports = run_many(names, o);
        stem = names.size() == 1 ? names.front() : "reports";
      }
      const Format f = format_from_string(run_format);
      write_output(render(reports, f, timing), g, stem + extension(f));
      return summarize(reports);
    }
    if (*list) {
      std::ostringstream os;
      if (list_targets) {
        for (const Target& t : targets())
          os << t.id << "\t" << t.experiment << "\t" << to_string(t.source) << "\t" << t.statement << "\n";
      } else {
        for (const ExperimentInfo& e : registry()) os << e.name << "\t" << e.summary << "\n";
      }
      std::cout << os.str();
      return exit_pass;
    }
    if (*cov) {
      std::vector<ExperimentReport> reports;
      if (!cov_from.empty()) {
        reports = parse_reports_json(read_file(cov_from));
      } else {
        RunOptions o;
        o.seed = g.seed;
        o.threads = g.threads;
        reports = run_many(all_names(), o);
      }
      const auto rows = coverage(reports);
      write_output(coverage_text(rows, cov_format == "csv"), g, cov_format == "csv" ? "coverage.csv" : "coverage.txt");
      for (const CoverageRow& r : rows)
        if (!r.covered) return exit_fail;
      return exit_pass;
    }
    if (*rep) {
      const auto reports = parse_reports_json(read_file(rep_in));
      const Format f = format_from_string(rep_format);
      write_output(render(reports, f, false), g, fs::path(rep_in).stem().string() + extension(f));
      return exit_pass;
    }
    if (*val) {
      std::cout << emit_config(parse_config(val_path));
      return exit_pass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_infra;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_infra;
  }
  return exit_infra;
}
