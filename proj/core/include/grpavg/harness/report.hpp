#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace grpavg::harness {

/// One comparison. `margin` is the slack left before the tolerance is
/// breached; pass iff margin >= 0.
struct Check {
  std::string name;
  std::string target;    // constants-table id, empty for internal checks
  std::string relation;  // "==", "<=", ">=" or "holds"
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  double margin = 0.0;
  bool pass = false;

  friend bool operator==(const Check&, const Check&) = default;
};

/// Worst-case distance curve d_p(t), t = 0..T, for plot-data output.
struct Curve {
  std::string chain;
  std::string norm;
  std::vector<double> distances;

  friend bool operator==(const Curve&, const Curve&) = default;
};

struct ExperimentReport {
  std::string name;
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<Check> checks;
  std::vector<Curve> curves;
  std::optional<std::string> error;  // infrastructure failure, no verdict
  double wall_time_ms = 0.0;

  bool passed() const;
  void metric(std::string key, double value);
  /// |observed - expected| <= tol.
  bool check_close(std::string name, std::string target, double observed, double expected, double tol);
  /// lhs <= rhs + tol.
  bool check_le(std::string name, std::string target, double lhs, double rhs, double tol = 0.0);
  /// lhs >= rhs - tol.
  bool check_ge(std::string name, std::string target, double lhs, double rhs, double tol = 0.0);
  bool check_true(std::string name, std::string target, bool ok);

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

enum class Format { json, csv, plot_data };

std::string to_string(Format f);
Format format_from_string(const std::string& name);

/// Canonical nested form. Wall time is only written when `timing` is set
/// so that the default output is byte-stable.
nlohmann::json to_json(const ExperimentReport& r, bool timing = false);
ExperimentReport report_from_json(const nlohmann::json& j);

/// json: {"schema_version", "reports": [...]} with two-space indentation.
/// csv: header plus one row per metric and per check.
/// plot-data: one (t, d) column pair per curve.
std::string render(const std::vector<ExperimentReport>& reports, Format f, bool timing = false);
std::vector<ExperimentReport> parse_reports_json(const std::string& text);

/// Writes render(...) to `path`; throws grpavg::Error when unwritable.
void emit_report(const std::vector<ExperimentReport>& reports, Format f, const std::filesystem::path& path,
                 bool timing = false);

/// Shortest round-trip decimal form used by the csv and plot writers.
std::string format_number(double v);

} // namespace grpavg::harness
