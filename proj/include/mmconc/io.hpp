#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmconc/core.hpp"
#include "mmconc/dynamics.hpp"
#include "mmconc/groups.hpp"
#include "mmconc/lipschitz.hpp"

namespace mmconc::io {

using Json = nlohmann::json;

/// Explicit {"labels", "dist", "pseudo"} or a generator:
///   {"generator": "hypercube", "n"}
///   {"generator": "cyclic", "n", "metric": "geodesic" | "normalized_geodesic"}
///   {"generator": "sym", "n", "metric": "normalized_hamming" | {"weighted": [...]}}
///   {"generator": "euclidean", "points": [[...], ...]}
/// Malformed input throws ConfigError naming the offending field; unknown
/// generators throw UnknownGenerator.
FiniteMetricSpace space_from_json(const Json& j, const std::string& where = "space");
Json to_json(const FiniteMetricSpace& x);

/// {"weights"}, {"uniform": true}, {"point_mass": i}, {"normalized": [...]}
/// or {"product": [[p0, p1], ...]} (product of coordinate laws on {0,1}^n,
/// point k has bit i = coordinate i). `n` is the size of the carrier.
Measure measure_from_json(const Json& j, std::size_t n, const std::string& where = "measure");
Json to_json(const Measure& mu);

Json to_json(const RealFunction& f);

struct GroupWithMetric {
  FiniteGroup group;
  /// Absent for explicit tables given without "dist".
  std::optional<RightInvariantMetric> metric;
  /// Short name for reports, e.g. "sym4".
  std::string name;
};

/// {"generator": "sym" | "cyclic" | "hypercube", "n", "metric"} or explicit
/// {"mul", "dist", "labels"}. Default metrics: normalized geodesic for
/// cyclic groups, normalized Hamming otherwise.
GroupWithMetric group_from_json(const Json& j, const std::string& where = "group");
Json to_json(const FiniteGroup& g, const FiniteMetricSpace* metric);

/// {"group", "space", "action"} or a generator:
///   {"generator": "regular", "group"}
///   {"generator": "coset", "group", "subgroup": [generators]}
///   {"generator": "trivial", "group", "space"}
///   {"generator": "cycle_with_apex", "n"}
FlowInstance flow_from_json(const Json& j, const std::string& where = "flow");
Json to_json(const FlowInstance& flow);

/// Reads and parses a JSON file; parse errors become ConfigError with the
/// line and column.
Json read_json_file(const std::string& path);
Json parse_json(const std::string& text, const std::string& source);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// RFC 4180 table with LF line endings; fields are quoted when needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace mmconc::io
