#include "grpavg/harness/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "grpavg/error.hpp"

namespace grpavg::harness {

using nlohmann::json;

namespace {

constexpr int report_schema_version = 1;

Check make_check(std::string name, std::string target, std::string relation, double lhs, double rhs, double tol,
                 double margin) {
  Check c;
  c.name = std::move(name);
  c.target = std::move(target);
  c.relation = std::move(relation);
  c.lhs = lhs;
  c.rhs = rhs;
  c.tolerance = tol;
  c.margin = std::isnan(margin) ? -1.0 : margin;
  c.pass = c.margin >= 0.0;
  return c;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// JSON cannot carry non-finite numbers; they are stored as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double from_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

} // namespace

bool ExperimentReport::passed() const {
  if (error) return false;
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

void ExperimentReport::metric(std::string key, double value) { metrics.emplace_back(std::move(key), value); }

bool ExperimentReport::check_close(std::string n, std::string t, double observed, double expected, double tol) {
  checks.push_back(make_check(std::move(n), std::move(t), "==", observed, expected, tol,
                              tol - std::abs(observed - expected)));
  return checks.back().pass;
}

bool ExperimentReport::check_le(std::string n, std::string t, double lhs, double rhs, double tol) {
  checks.push_back(make_check(std::move(n), std::move(t), "<=", lhs, rhs, tol, rhs + tol - lhs));
  return checks.back().pass;
}

bool ExperimentReport::check_ge(std::string n, std::string t, double lhs, double rhs, double tol) {
  checks.push_back(make_check(std::move(n), std::move(t), ">=", lhs, rhs, tol, lhs - (rhs - tol)));
  return checks.back().pass;
}

bool ExperimentReport::check_true(std::string n, std::string t, bool ok) {
  checks.push_back(make_check(std::move(n), std::move(t), "holds", ok ? 1.0 : 0.0, 1.0, 0.0, ok ? 0.0 : -1.0));
  return ok;
}

std::string to_string(Format f) {
  switch (f) {
  case Format::json: return "json";
  case Format::csv: return "csv";
  case Format::plot_data: return "plot-data";
  }
  return "?";
}

Format format_from_string(const std::string& name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  if (name == "plot-data") return Format::plot_data;
  throw DomainError("unknown report format '" + name + "' (json, csv, plot-data)");
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const ExperimentReport& r, bool timing) {
  json j;
  j["name"] = r.name;
  j["inputs"] = r.inputs;
  j["status"] = r.error ? "error" : (r.passed() ? "pass" : "fail");
  json metrics = json::array();
  for (const auto& [k, v] : r.metrics) metrics.push_back({{"name", k}, {"value", number(v)}});
  j["metrics"] = std::move(metrics);
  json checks = json::array();
  for (const Check& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"target", c.target},
                      {"relation", c.relation},
                      {"lhs", number(c.lhs)},
                      {"rhs", number(c.rhs)},
                      {"tolerance", number(c.tolerance)},
                      {"margin", number(c.margin)},
                      {"pass", c.pass}});
  }
  j["checks"] = std::move(checks);
  json curves = json::array();
  for (const Curve& c : r.curves) {
    json d = json::array();
    for (double v : c.distances) d.push_back(number(v));
    curves.push_back({{"chain", c.chain}, {"norm", c.norm}, {"distances", std::move(d)}});
  }
  j["curves"] = std::move(curves);
  if (r.error) j["error"] = *r.error;
  if (timing) j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport r;
  r.name = j.at("name").get<std::string>();
  r.inputs = j.at("inputs");
  for (const json& m : j.at("metrics")) r.metrics.emplace_back(m.at("name").get<std::string>(), from_number(m.at("value")));
  for (const json& c : j.at("checks")) {
    Check k;
    k.name = c.at("name").get<std::string>();
    k.target = c.at("target").get<std::string>();
    k.relation = c.at("relation").get<std::string>();
    k.lhs = from_number(c.at("lhs"));
    k.rhs = from_number(c.at("rhs"));
    k.tolerance = from_number(c.at("tolerance"));
    k.margin = from_number(c.at("margin"));
    k.pass = c.at("pass").get<bool>();
    r.checks.push_back(std::move(k));
  }
  for (const json& c : j.at("curves")) {
    Curve k;
    k.chain = c.at("chain").get<std::string>();
    k.norm = c.at("norm").get<std::string>();
    for (const json& v : c.at("distances")) k.distances.push_back(from_number(v));
    r.curves.push_back(std::move(k));
  }
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  if (j.contains("wall_time_ms")) r.wall_time_ms = j.at("wall_time_ms").get<double>();
  return r;
}

std::string render(const std::vector<ExperimentReport>& reports, Format f, bool timing) {
  std::ostringstream out;
  switch (f) {
  case Format::json: {
    json j;
    j["schema_version"] = report_schema_version;
    j["reports"] = json::array();
    for (const auto& r : reports) j["reports"].push_back(to_json(r, timing));
    out << j.dump(2) << '\n';
    break;
  }
  case Format::csv: {
    out << "experiment,kind,name,target,relation,lhs,rhs,tolerance,margin,pass\n";
    for (const auto& r : reports) {
      for (const auto& [k, v] : r.metrics) {
        out << csv_field(r.name) << ",metric," << csv_field(k) << ",,," << format_number(v) << ",,,,\n";
      }
      for (const Check& c : r.checks) {
        out << csv_field(r.name) << ",check," << csv_field(c.name) << ',' << csv_field(c.target) << ','
            << c.relation << ',' << format_number(c.lhs) << ',' << format_number(c.rhs) << ','
            << format_number(c.tolerance) << ',' << format_number(c.margin) << ',' << (c.pass ? "true" : "false")
            << '\n';
      }
    }
    break;
  }
  case Format::plot_data: {
    std::vector<std::pair<std::string, const Curve*>> cols;
    for (const auto& r : reports)
      for (const Curve& c : r.curves) cols.emplace_back(r.name + "/" + c.chain, &c);
    std::size_t rows = 0;
    for (const auto& [label, c] : cols) rows = std::max(rows, c->distances.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ',';
      out << csv_field(cols[i].first + ":t") << ',' << csv_field(cols[i].first + ":d_" + cols[i].second->norm);
    }
    out << '\n';
    for (std::size_t t = 0; t < rows; ++t) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out << ',';
        const auto& d = cols[i].second->distances;
        if (t < d.size()) out << t << ',' << format_number(d[t]);
        else out << ',';
      }
      out << '\n';
    }
    break;
  }
  }
  return out.str();
}

std::vector<ExperimentReport> parse_reports_json(const std::string& text) {
  const json j = json::parse(text);
  std::vector<ExperimentReport> out;
  for (const json& r : j.at("reports")) out.push_back(report_from_json(r));
  return out;
}

void emit_report(const std::vector<ExperimentReport>& reports, Format f, const std::filesystem::path& path,
                 bool timing) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write report to " + path.string());
  os << render(reports, f, timing);
  if (!os) throw Error("failed writing report to " + path.string());
}

} // namespace grpavg::harness
