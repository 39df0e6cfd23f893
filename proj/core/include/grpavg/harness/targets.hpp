#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace grpavg::harness {

/// Where a regression value comes from.
enum class Source {
  published,  // a number or statement printed with the original result
  computed,   // produced here by an independent oracle and then frozen
  structural  // follows from symmetry or a definition
};

std::string to_string(Source s);

/// One entry of the checked-in constants table. `values` is empty for
/// purely qualitative targets (an inequality or a predicate).
struct Target {
  std::string id;
  std::string experiment;
  std::string statement;
  std::vector<double> values;
  double tolerance = 0.0;
  Source source = Source::published;
};

const std::vector<Target>& targets();
/// Throws grpavg::DomainError for an unknown id.
const Target& target(std::string_view id);

} // namespace grpavg::harness
