#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "grpavg/harness/config.hpp"
#include "grpavg/harness/report.hpp"

namespace grpavg::harness {

/// Inputs handed to an experiment body. `params` always holds the full
/// defaults with overrides applied.
struct RunContext {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  nlohmann::json params = nlohmann::json::object();
  std::map<std::string, double> tolerances;

  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  double tolerance(const std::string& key, double fallback) const;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  nlohmann::json defaults;
  std::function<void(const RunContext&, ExperimentReport&)> body;
};

const std::vector<ExperimentInfo>& registry();
const ExperimentInfo* find_experiment(std::string_view name);

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  nlohmann::json params = nlohmann::json::object();  // overrides, validated against defaults
  std::map<std::string, double> tolerances;
};

/// Per-experiment seed: splitmix64(root ^ fnv1a64(name)). Independent of
/// scheduling, so parallel and serial runs produce identical reports.
std::uint64_t split_seed(std::uint64_t root, std::string_view name);

/// Runs one registered experiment. Assertion breaches become failing
/// checks; grpavg::Error thrown by the body is recorded in `error`.
/// Unknown names and invalid overrides throw ConfigError.
ExperimentReport run_experiment(const std::string& name, const RunOptions& options = {});

/// Runs a parsed config once per seed. Named-experiment configs delegate
/// to the registry; model configs compute the requested diagnostics.
std::vector<ExperimentReport> run_config(const ExperimentConfig& config, std::size_t threads = 1);

/// Runs the named experiments on up to `threads` workers. Reports come
/// back in the order of `names`.
std::vector<ExperimentReport> run_many(const std::vector<std::string>& names, const RunOptions& options);

/// Traceability rows: target id, experiment, source and the checks of
/// that experiment citing the target (filled from a run when given).
struct CoverageRow {
  std::string target;
  std::string experiment;
  std::string source;
  std::string statement;
  std::vector<std::string> checks;
  bool covered = false;
};

std::vector<CoverageRow> coverage(const std::vector<ExperimentReport>& reports);

} // namespace grpavg::harness
