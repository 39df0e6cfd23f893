#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "grpavg/averaging.hpp"
#include "grpavg/dynamics.hpp"
#include "grpavg/error.hpp"
#include "grpavg/models.hpp"

namespace grpavg::harness {

inline constexpr int config_schema_version = 1;

/// Parse or schema failure. `line` and `column` are 1-based and zero
/// when the failure is not tied to a text position.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

struct NamedModelSpec {
  std::string name;
  ModelParams params;
};

struct InlineModel {
  Matrix matrix;
  std::optional<std::vector<double>> pi;  // defaults to the computed stationary law
};

struct NamedGroupSpec {
  std::string name;
  GroupParams params;
};

struct InlineGroup {
  std::vector<std::vector<std::size_t>> perms;
};

struct NuSpec {
  std::optional<AverageKind> kind;
  std::vector<PairMeasure::Atom> atoms;  // indices into the closed group's element list
};

struct MixingSpec {
  Norm norm = Norm::L1;
  std::vector<double> eps{0.25};
  std::uint64_t t_max = 100000;
};

struct ExperimentConfig {
  int schema_version = config_schema_version;
  std::string name;
  std::optional<std::string> experiment;            // registered experiment to run
  nlohmann::json params = nlohmann::json::object();  // overrides of the experiment defaults
  std::optional<std::variant<NamedModelSpec, InlineModel>> model;
  std::optional<std::variant<NamedGroupSpec, InlineGroup>> group;
  std::optional<NuSpec> nu;
  std::vector<std::string> diagnostics;
  std::vector<std::uint64_t> seeds{0};
  std::map<std::string, double> tolerances;
  MixingSpec mixing;
};

/// Diagnostics understood by custom (model-based) configs.
const std::vector<std::string>& diagnostic_names();
/// Tolerance keys that may be overridden.
const std::vector<std::string>& tolerance_names();

ExperimentConfig parse_config_text(const std::string& text);
/// Reads and parses a file; errors name the path.
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Canonical form with every default filled in.
nlohmann::json to_json(const ExperimentConfig& c);
/// Canonical text: to_json(c).dump(2) plus a newline.
std::string emit_config(const ExperimentConfig& c);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

} // namespace grpavg::harness
