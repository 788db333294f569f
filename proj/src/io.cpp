#include "mmconc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mmconc::io {
namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ConfigError, where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) config_error(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) config_error(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::size_t as_size(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    config_error(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) config_error(where, "expected a number");
  return j.get<double>();
}

std::vector<double> as_doubles(const Json& j, const std::string& where) {
  if (!j.is_array()) config_error(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_double(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<double>> as_matrix(const Json& j, const std::string& where) {
  if (!j.is_array()) config_error(where, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_doubles(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<Index>> as_index_matrix(const Json& j, const std::string& where) {
  if (!j.is_array()) config_error(where, "expected an array of rows");
  std::vector<std::vector<Index>> out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_where = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) config_error(row_where, "expected an array of indices");
    for (std::size_t k = 0; k < j[i].size(); ++k)
      out[i].push_back(as_size(j[i][k], row_where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<std::string> labels_or_default(const Json& j, std::size_t n, const std::string& where) {
  std::vector<std::string> labels;
  auto it = j.find("labels");
  if (it == j.end()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return labels;
  }
  if (!it->is_array() || it->size() != n)
    config_error(where + ".labels", "expected " + std::to_string(n) + " strings");
  for (const auto& l : *it) {
    if (!l.is_string()) config_error(where + ".labels", "expected strings");
    labels.push_back(l.get<std::string>());
  }
  return labels;
}

std::string generator_of(const Json& j, const std::string& where) {
  const Json& g = field(j, "generator", where);
  if (!g.is_string()) config_error(where + ".generator", "expected a string");
  return g.get<std::string>();
}

// Library validation errors inside a config surface as ConfigError with the
// field path, except UnknownGenerator, which callers dispatch on.
template <typename Fn>
auto with_context(const std::string& where, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::UnknownGenerator) throw;
    config_error(where, e.what());
  }
}

FiniteMetricSpace sym_metric_from_json(const Json& j, std::size_t n, const std::string& where) {
  auto it = j.find("metric");
  if (it == j.end() || (it->is_string() && it->get<std::string>() == "normalized_hamming"))
    return sym_hamming_space(n);
  if (it->is_object() && it->contains("weighted")) {
    const auto w = as_doubles((*it)["weighted"], where + ".metric.weighted");
    if (w.size() != n) config_error(where + ".metric.weighted", "expected n weights");
    return sym_weighted_space(n, w);
  }
  config_error(where + ".metric", "expected \"normalized_hamming\" or {\"weighted\": [...]}");
}

FiniteMetricSpace cyclic_metric_from_json(const Json& j, std::size_t n, const std::string& where,
                                          bool normalized_default) {
  auto it = j.find("metric");
  if (it == j.end()) return cyclic_geodesic_space(n, normalized_default);
  if (it->is_string() && it->get<std::string>() == "geodesic") return cyclic_geodesic_space(n, false);
  if (it->is_string() && it->get<std::string>() == "normalized_geodesic")
    return cyclic_geodesic_space(n, true);
  config_error(where + ".metric", "expected \"geodesic\" or \"normalized_geodesic\"");
}

void check_hypercube_metric(const Json& j, const std::string& where) {
  auto it = j.find("metric");
  if (it != j.end() && !(it->is_string() && it->get<std::string>() == "normalized_hamming"))
    config_error(where + ".metric", "hypercube supports \"normalized_hamming\" only");
}

}  // namespace

FiniteMetricSpace space_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) config_error(where, "expected an object");
  if (j.contains("generator")) {
    const std::string gen = generator_of(j, where);
    return with_context(where, [&]() -> FiniteMetricSpace {
      if (gen == "hypercube") {
        check_hypercube_metric(j, where);
        return hypercube_hamming_space(as_size(field(j, "n", where), where + ".n"));
      }
      if (gen == "cyclic") {
        const std::size_t n = as_size(field(j, "n", where), where + ".n");
        return cyclic_metric_from_json(j, n, where, false);
      }
      if (gen == "sym") {
        const std::size_t n = as_size(field(j, "n", where), where + ".n");
        return sym_metric_from_json(j, n, where);
      }
      if (gen == "euclidean") {
        const auto pts = as_matrix(field(j, "points", where), where + ".points");
        const std::size_t n = pts.size();
        std::vector<double> dist(n * n, 0.0);
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            if (pts[a].size() != pts[b].size())
              config_error(where + ".points", "points of different dimension");
            double s = 0.0;
            for (std::size_t k = 0; k < pts[a].size(); ++k)
              s += (pts[a][k] - pts[b][k]) * (pts[a][k] - pts[b][k]);
            dist[a * n + b] = std::sqrt(s);
          }
        return FiniteMetricSpace(labels_or_default(j, n, where), std::move(dist));
      }
      throw Error(ErrorKind::UnknownGenerator, where + ": unknown space generator \"" + gen + "\"");
    });
  }
  const auto dist = as_matrix(field(j, "dist", where), where + ".dist");
  bool pseudo = false;
  if (auto it = j.find("pseudo"); it != j.end()) {
    if (!it->is_boolean()) config_error(where + ".pseudo", "expected a boolean");
    pseudo = it->get<bool>();
  }
  auto labels = labels_or_default(j, dist.size(), where);
  return with_context(where, [&] { return FiniteMetricSpace(std::move(labels), dist, pseudo); });
}

Json to_json(const FiniteMetricSpace& x) {
  const std::size_t n = x.size();
  Json dist = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < n; ++k) row.push_back(x(i, k));
    dist.push_back(std::move(row));
  }
  Json out{{"labels", x.labels()}, {"dist", std::move(dist)}};
  if (x.is_pseudo()) out["pseudo"] = true;
  return out;
}

Measure measure_from_json(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_object()) config_error(where, "expected an object");
  return with_context(where, [&]() -> Measure {
    if (j.contains("weights")) {
      auto w = as_doubles(j["weights"], where + ".weights");
      if (w.size() != n)
        config_error(where + ".weights", "expected " + std::to_string(n) + " weights");
      return Measure(std::move(w));
    }
    if (j.contains("normalized")) {
      auto w = as_doubles(j["normalized"], where + ".normalized");
      if (w.size() != n)
        config_error(where + ".normalized", "expected " + std::to_string(n) + " weights");
      return Measure::normalized(std::move(w));
    }
    if (j.contains("uniform")) {
      if (j["uniform"] != true) config_error(where + ".uniform", "expected true");
      return Measure::uniform(n);
    }
    if (j.contains("point_mass")) {
      const std::size_t at = as_size(j["point_mass"], where + ".point_mass");
      if (at >= n) config_error(where + ".point_mass", "point outside the space");
      return Measure::point_mass(n, at);
    }
    if (j.contains("product")) {
      const auto coords = as_matrix(j["product"], where + ".product");
      const std::size_t dim = coords.size();
      if (dim >= 63 || (std::size_t{1} << dim) != n)
        config_error(where + ".product", "expected log2(n) coordinate laws");
      for (const auto& c : coords)
        if (c.size() != 2) config_error(where + ".product", "each coordinate law has 2 weights");
      std::vector<double> w(n, 1.0);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < dim; ++i) w[k] *= coords[i][(k >> i) & 1];
      return Measure(std::move(w));
    }
    config_error(where, "expected one of weights, normalized, uniform, point_mass, product");
  });
}

Json to_json(const Measure& mu) { return Json{{"weights", mu.weights()}}; }

Json to_json(const RealFunction& f) { return Json(f.values()); }

GroupWithMetric group_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) config_error(where, "expected an object");
  if (j.contains("generator")) {
    const std::string gen = generator_of(j, where);
    const std::size_t n = as_size(field(j, "n", where), where + ".n");
    return with_context(where, [&]() -> GroupWithMetric {
      if (gen == "cyclic") {
        auto g = FiniteGroup::cyclic(n);
        RightInvariantMetric d(g, cyclic_metric_from_json(j, n, where, true));
        return {std::move(g), std::move(d), "z" + std::to_string(n)};
      }
      if (gen == "hypercube") {
        check_hypercube_metric(j, where);
        auto g = FiniteGroup::hypercube(n);
        RightInvariantMetric d(g, hypercube_hamming_space(n));
        return {std::move(g), std::move(d), "z2^" + std::to_string(n)};
      }
      if (gen == "sym") {
        auto g = FiniteGroup::sym(n);
        RightInvariantMetric d(g, sym_metric_from_json(j, n, where));
        return {std::move(g), std::move(d), "sym" + std::to_string(n)};
      }
      throw Error(ErrorKind::UnknownGenerator, where + ": unknown group generator \"" + gen + "\"");
    });
  }
  const auto mul = as_index_matrix(field(j, "mul", where), where + ".mul");
  auto labels = labels_or_default(j, mul.size(), where);
  std::string name = "group";
  if (auto it = j.find("name"); it != j.end() && it->is_string()) name = it->get<std::string>();
  auto group = with_context(where, [&] { return FiniteGroup(mul, labels); });
  if (!j.contains("dist")) return {std::move(group), std::nullopt, name};
  const auto dist = as_matrix(j["dist"], where + ".dist");
  bool pseudo = false;
  if (auto it = j.find("pseudo"); it != j.end()) pseudo = it->is_boolean() && it->get<bool>();
  auto metric = with_context(where, [&] {
    return RightInvariantMetric(group, FiniteMetricSpace(labels, dist, pseudo));
  });
  return {std::move(group), std::move(metric), name};
}

Json to_json(const FiniteGroup& g, const FiniteMetricSpace* metric) {
  const std::size_t n = g.order();
  Json mul = Json::array();
  for (std::size_t a = 0; a < n; ++a) {
    Json row = Json::array();
    for (std::size_t b = 0; b < n; ++b) row.push_back(g.mul(a, b));
    mul.push_back(std::move(row));
  }
  Json out{{"labels", g.labels()}, {"mul", std::move(mul)}};
  if (metric != nullptr) {
    Json space = to_json(*metric);
    out["dist"] = std::move(space["dist"]);
    if (metric->is_pseudo()) out["pseudo"] = true;
  }
  return out;
}

FlowInstance flow_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) config_error(where, "expected an object");
  if (j.contains("generator")) {
    const std::string gen = generator_of(j, where);
    if (gen == "cycle_with_apex") {
      const std::size_t n = as_size(field(j, "n", where), where + ".n");
      return with_context(where, [&] { return cycle_with_apex_flow(n); });
    }
    if (gen != "regular" && gen != "coset" && gen != "trivial")
      throw Error(ErrorKind::UnknownGenerator, where + ": unknown flow generator \"" + gen + "\"");
    auto g = group_from_json(field(j, "group", where), where + ".group");
    if (gen == "trivial") {
      auto space = space_from_json(field(j, "space", where), where + ".space");
      return with_context(where, [&] { return trivial_flow(g.group, space); });
    }
    if (!g.metric) config_error(where + ".group", "a metric (\"dist\") is required");
    if (gen == "regular")
      return with_context(where, [&] { return regular_flow(g.group, g.metric->base()); });
    const Json& sub = field(j, "subgroup", where);
    if (!sub.is_array()) config_error(where + ".subgroup", "expected an array of elements");
    std::vector<Index> gens;
    for (std::size_t i = 0; i < sub.size(); ++i)
      gens.push_back(as_size(sub[i], where + ".subgroup[" + std::to_string(i) + "]"));
    return with_context(where, [&] { return coset_flow(g.group, *g.metric, gens); });
  }
  auto g = group_from_json(field(j, "group", where), where + ".group");
  auto space = space_from_json(field(j, "space", where), where + ".space");
  auto action = as_index_matrix(field(j, "action", where), where + ".action");
  return with_context(where, [&] {
    return FlowInstance(std::move(g.group), std::move(space), std::move(action));
  });
}

Json to_json(const FlowInstance& flow) {
  return Json{{"group", to_json(flow.group(), nullptr)},
              {"space", to_json(flow.space())},
              {"action", flow.action_table()}};
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Locate the byte offset as line:column for the diagnostic.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::ConfigError, source + ":" + std::to_string(line) + ":" +
                                            std::to_string(column) + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw Error(ErrorKind::DimensionMismatch, "CSV row width differs from the header");
  rows_.push_back(std::move(row));
}

namespace {
void write_field(std::string& out, const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) {
    out += f;
    return;
  }
  out += '"';
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void write_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    write_field(out, fields[i]);
  }
  out += '\n';
}
}  // namespace

std::string CsvTable::str() const {
  std::string out;
  write_line(out, header_);
  for (const auto& r : rows_) write_line(out, r);
  return out;
}

}  // namespace mmconc::io
