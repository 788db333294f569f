#include "mmconc/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "mmconc/concentration.hpp"
#include "mmconc/dynamics.hpp"
#include "mmconc/groups.hpp"
#include "mmconc/measure_metrics.hpp"
#include "mmconc/parallel.hpp"

namespace mmconc::scenarios {
namespace {

using io::Json;

constexpr double kAssertTol = 1e-7;

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ConfigError, where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) config_error(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double get_double(const Json& j, const char* key, double fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) config_error(where + "." + key, "expected a number");
  return it->get<double>();
}

std::size_t get_size(const Json& j, const char* key, std::size_t fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0)
    config_error(where + "." + key, "expected a non-negative integer");
  return it->get<std::size_t>();
}

bool get_bool(const Json& j, const char* key, bool fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) config_error(where + "." + key, "expected a boolean");
  return it->get<bool>();
}

std::vector<double> get_doubles(const Json& j, const char* key, std::vector<double> fallback,
                                const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_array() || it->empty()) config_error(where + "." + key, "expected a non-empty array");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) config_error(where + "." + key, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::size_t> get_sizes(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return {j.get<std::size_t>()};
  if (!j.is_array()) config_error(where, "expected an integer or an array of integers");
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      config_error(where, "expected non-negative integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

std::vector<double> get_alphas(const Json& j, std::vector<double> fallback, const std::string& where) {
  auto alphas = get_doubles(j, "alphas", std::move(fallback), where);
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) config_error(where + ".alphas", "alphas must lie in (0, 1)");
  return alphas;
}

struct Context {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool oracle = false;
  bool timing = false;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string runtime_field(const Context& ctx, double ms) {
  if (!ctx.timing) return "";
  return io::format_double(std::round(ms * 1000.0) / 1000.0);
}

ObsDiamOptions obs_options(const Json& j, const Context& ctx, const std::string& where) {
  ObsDiamOptions o;
  o.budget = get_size(j, "budget", o.budget, where);
  o.seed = ctx.seed;
  o.use_oracle = ctx.oracle || get_bool(j, "oracle", false, where);
  o.oracle_max_points = get_size(j, "oracle_max_points", o.oracle_max_points, where);
  o.local_search_max_points = get_size(j, "local_search_max_points", o.local_search_max_points, where);
  o.local_search_sweeps = get_size(j, "local_search_sweeps", o.local_search_sweeps, where);
  o.order_lp_max_points = get_size(j, "order_lp_max_points", o.order_lp_max_points, where);
  o.order_lp_starts = get_size(j, "order_lp_starts", o.order_lp_starts, where);
  return o;
}

MmSpace mm_from_json(const Json& j, const std::string& where) {
  auto space = io::space_from_json(field(j, "space", where), where + ".space");
  Json uniform{{"uniform", true}};
  auto mu = io::measure_from_json(j.contains("measure") ? j["measure"] : uniform, space.size(),
                                  where + ".measure");
  return MmSpace(std::move(space), std::move(mu));
}

// A "family" expands a generator over a list of sizes, uniform measures.
std::vector<MmSpace> family_from_json(const Json& j, const std::string& where,
                                      std::vector<double>* sizes) {
  const auto ns = get_sizes(field(j, "n", where), where + ".n");
  std::vector<MmSpace> out;
  for (std::size_t n : ns) {
    Json spec = j;
    spec["n"] = n;
    auto space = io::space_from_json(spec, where);
    auto mu = Measure::uniform(space.size());
    out.emplace_back(std::move(space), std::move(mu));
    if (sizes) sizes->push_back(static_cast<double>(n));
  }
  return out;
}

std::vector<MmSpace> spaces_from_config(const Json& config, std::vector<double>* sizes) {
  if (config.contains("family")) return family_from_json(config["family"], "family", sizes);
  std::vector<MmSpace> out;
  if (config.contains("spaces")) {
    const Json& list = config["spaces"];
    if (!list.is_array()) config_error("spaces", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i)
      out.push_back(mm_from_json(list[i], "spaces[" + std::to_string(i) + "]"));
  } else {
    out.push_back(mm_from_json(config, "config"));
  }
  if (sizes)
    for (const auto& m : out) sizes->push_back(static_cast<double>(m.size()));
  return out;
}

std::string generator_name(const Json& j) {
  auto it = j.find("generator");
  return it != j.end() && it->is_string() ? it->get<std::string>() : "";
}

std::string optional_field(const std::optional<double>& v) {
  return v ? io::format_double(*v) : "";
}

// ---------------------------------------------------------------- mmdist

RunResult run_mmdist(const Json& config, const Context& ctx) {
  auto space = io::space_from_json(field(config, "space", "config"), "space");
  auto mu = io::measure_from_json(field(config, "mu", "config"), space.size(), "mu");
  auto nu = io::measure_from_json(field(config, "nu", "config"), space.size(), "nu");
  std::string metric = "both";
  if (auto it = config.find("metric"); it != config.end()) {
    if (!it->is_string()) config_error("metric", "expected a string");
    metric = it->get<std::string>();
  }
  if (metric != "mt" && metric != "prokhorov" && metric != "both")
    config_error("metric", "expected mt, prokhorov or both");

  RunResult result;
  io::CsvTable table({"metric", "value", "runtime_ms"});
  if (metric != "prokhorov") {
    Stopwatch sw;
    double v = d_mt(mu, nu, space);
    table.add_row({"mt", io::format_double(v), runtime_field(ctx, sw.ms())});
  }
  if (metric != "mt") {
    Stopwatch sw;
    double v = d_prokhorov(mu, nu, space);
    table.add_row({"prokhorov", io::format_double(v), runtime_field(ctx, sw.ms())});
    if (ctx.oracle) {
      try {
        Stopwatch so;
        double o = d_prokhorov_oracle(mu, nu, space).value;
        table.add_row({"prokhorov_oracle", io::format_double(o), runtime_field(ctx, so.ms())});
        if (std::abs(o - v) > 1e-9)
          result.assertion_failures.push_back("prokhorov " + io::format_double(v) +
                                              " differs from the subset oracle " +
                                              io::format_double(o));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TooLarge) throw;
        result.errors.push_back({table.rows().size(), e.what()});
      }
    }
  }
  result.tables.push_back({"mmdist", std::move(table)});
  return result;
}

// ------------------------------------------------------- obsdiam / levy

const std::vector<std::string> kObsHeader{"index",  "n_points", "alpha",      "lower_bound",
                                          "oracle_value", "eta", "witness_id", "runtime_ms"};

void check_report(const ObsDiamReport& r, std::size_t index, RunResult& result) {
  if (r.oracle_value && r.lower_bound > *r.oracle_value + kAssertTol)
    result.assertion_failures.push_back("row " + std::to_string(index) + ": lower bound " +
                                        io::format_double(r.lower_bound) + " exceeds the oracle " +
                                        io::format_double(*r.oracle_value));
}

Json witness_entry(std::size_t index, double alpha, const ObsDiamReport& r) {
  return Json{{"index", index},
              {"alpha", alpha},
              {"method", to_string(r.method)},
              {"witness", io::to_json(r.witness)}};
}

RunResult run_obsdiam(const Json& config, const Context& ctx) {
  const auto spaces = spaces_from_config(config, nullptr);
  const auto alphas = get_alphas(config, {0.1, 0.3, 0.5}, "config");
  const auto options = obs_options(config, ctx, "config");

  struct Cell {
    std::optional<ObsDiamReport> report;
    std::string error;
    double ms = 0.0;
  };
  std::vector<Cell> cells(spaces.size() * alphas.size());
  parallel_for(cells.size(), ctx.threads, [&](std::size_t c) {
    Stopwatch sw;
    try {
      cells[c].report = obs_diam(spaces[c / alphas.size()], alphas[c % alphas.size()], options);
    } catch (const Error& e) {
      cells[c].error = e.what();
    }
    cells[c].ms = sw.ms();
  });

  RunResult result;
  io::CsvTable table(kObsHeader);
  Json witnesses = Json::array();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::size_t i = c / alphas.size();
    const double alpha = alphas[c % alphas.size()];
    if (!cells[c].report) {
      result.errors.push_back({c, cells[c].error});
      continue;
    }
    const auto& r = *cells[c].report;
    table.add_row({std::to_string(i), std::to_string(spaces[i].size()), io::format_double(alpha),
                   io::format_double(r.lower_bound), optional_field(r.oracle_value),
                   io::format_double(r.eta), std::to_string(r.witness_id),
                   runtime_field(ctx, cells[c].ms)});
    check_report(r, i, result);
    witnesses.push_back(witness_entry(i, alpha, r));
  }
  result.tables.push_back({"obsdiam", std::move(table)});
  result.documents.emplace_back("witnesses", std::move(witnesses));
  return result;
}

RunResult run_levy_scan(const Json& config, const Context& ctx) {
  std::vector<double> sizes;
  const auto spaces = spaces_from_config(config, &sizes);
  const auto alphas = get_alphas(config, {0.1, 0.3, 0.5}, "config");
  const auto options = obs_options(config, ctx, "config");
  std::vector<double> scales = sizes;
  if (auto it = config.find("scales"); it != config.end() && !it->is_string()) {
    scales = get_doubles(config, "scales", {}, "config");
    if (scales.size() != spaces.size()) config_error("scales", "expected one scale per space");
  }

  Stopwatch sw;
  const LevyTable levy = levy_diagnostic(spaces, alphas, options, scales, ctx.threads);
  const double per_cell = sw.ms() / static_cast<double>(std::max<std::size_t>(1, levy.cells.size()));

  RunResult result;
  io::CsvTable table(kObsHeader);
  Json witnesses = Json::array();
  for (const auto& cell : levy.cells) {
    const double alpha = cell.report.alpha;
    table.add_row({std::to_string(cell.index), std::to_string(cell.n_points),
                   io::format_double(alpha), io::format_double(cell.report.lower_bound),
                   optional_field(cell.report.oracle_value), io::format_double(cell.report.eta),
                   std::to_string(cell.report.witness_id), runtime_field(ctx, per_cell)});
    check_report(cell.report, cell.index, result);
    witnesses.push_back(witness_entry(cell.index, alpha, cell.report));
  }
  io::CsvTable decay({"alpha", "decay_exponent"});
  for (std::size_t a = 0; a < alphas.size(); ++a)
    decay.add_row({io::format_double(alphas[a]), io::format_double(levy.decay_exponents[a])});
  result.tables.push_back({"levy-scan", std::move(table)});
  result.tables.push_back({"decay", std::move(decay)});
  result.documents.emplace_back("witnesses", std::move(witnesses));
  return result;
}

// ----------------------------------------------------- invariance-defect

RunResult run_invariance_defect(const Json& config, const Context& ctx) {
  std::vector<Json> entries;
  if (config.contains("groups")) {
    if (!config["groups"].is_array()) config_error("groups", "expected an array");
    for (const auto& e : config["groups"]) entries.push_back(e);
  } else {
    entries.push_back(config);
  }

  RunResult result;
  io::CsvTable table({"group", "order", "g", "defect", "runtime_ms"});
  std::size_t row = 0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string where = config.contains("groups") ? "groups[" + std::to_string(k) + "]" : "config";
    const Json& entry = entries[k];
    auto g = io::group_from_json(field(entry, "group", where), where + ".group");
    if (!g.metric) config_error(where + ".group", "a metric (\"dist\") is required");
    if (auto it = entry.find("name"); it != entry.end() && it->is_string()) g.name = it->get<std::string>();
    Json uniform{{"uniform", true}};
    const Measure mu = io::measure_from_json(entry.contains("measure") ? entry["measure"] : uniform,
                                             g.group.order(), where + ".measure");
    std::vector<Index> elements;
    if (auto it = entry.find("elements"); it != entry.end()) {
      for (std::size_t e : get_sizes(*it, where + ".elements")) {
        if (e >= g.group.order()) config_error(where + ".elements", "element outside the group");
        elements.push_back(e);
      }
    } else {
      for (Index e = 0; e < g.group.order(); ++e) elements.push_back(e);
    }
    const bool haar = mu == Measure::uniform(g.group.order());

    std::vector<double> values(elements.size()), ms(elements.size());
    std::vector<std::string> errors(elements.size());
    parallel_for(elements.size(), ctx.threads, [&](std::size_t i) {
      Stopwatch sw;
      try {
        values[i] = invariance_defect(mu, elements[i], g.group, *g.metric);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
      ms[i] = sw.ms();
    });
    for (std::size_t i = 0; i < elements.size(); ++i, ++row) {
      if (!errors[i].empty()) {
        result.errors.push_back({row, errors[i]});
        continue;
      }
      table.add_row({g.name, std::to_string(g.group.order()), g.group.labels()[elements[i]],
                     io::format_double(values[i]), runtime_field(ctx, ms[i])});
      if (haar && values[i] > 1e-9)
        result.assertion_failures.push_back(g.name + ": Haar measure has defect " +
                                            io::format_double(values[i]) + " at " +
                                            g.group.labels()[elements[i]]);
    }
  }
  result.tables.push_back({"invariance-defect", std::move(table)});
  return result;
}

// ------------------------------------------------------------ flow-check

std::vector<Measure> measures_on_group(const Json& j, const FiniteGroup& group,
                                       const std::string& where) {
  const std::size_t n = group.order();
  std::vector<Measure> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(io::measure_from_json(j[i], n, where + "[" + std::to_string(i) + "]"));
  } else if (j.is_object() && j.contains("haar")) {
    const std::size_t count = get_size(j, "haar", 1, where);
    out.assign(std::max<std::size_t>(count, 1), Measure::uniform(n));
  } else if (j.is_object() && j.contains("perturbed_haar")) {
    // mu_i = (1 - t_i) Haar + t_i delta_at with t_i = 1 / (i + 2).
    const Json& p = j["perturbed_haar"];
    const std::size_t count = get_size(p, "count", 4, where + ".perturbed_haar");
    const std::size_t at = get_size(p, "at", group.identity(), where + ".perturbed_haar");
    if (at >= n) config_error(where + ".perturbed_haar.at", "element outside the group");
    for (std::size_t i = 0; i < count; ++i) {
      const double t = 1.0 / static_cast<double>(i + 2);
      std::vector<double> w(n, (1.0 - t) / static_cast<double>(n));
      w[at] += t;
      out.push_back(Measure::normalized(std::move(w)));
    }
  } else {
    config_error(where, "expected an array of measures, {\"haar\": k} or {\"perturbed_haar\": {...}}");
  }
  if (out.empty()) config_error(where, "the measure sequence is empty");
  return out;
}

struct FlowRow {
  std::string name;
  OrbitBoundReport report;
  FixedPointCandidate x0;
  std::string x0_label;
  double ms = 0.0;
};

FlowRow run_flow_scenario(const Json& s, const std::string& where, const Context& ctx) {
  FlowRow row;
  row.name = s.contains("name") && s["name"].is_string() ? s["name"].get<std::string>() : where;
  const FlowInstance flow = io::flow_from_json(field(s, "flow", where), where + ".flow");
  const auto measures = measures_on_group(s.contains("measures") ? s["measures"] : Json{{"haar", 2}},
                                          flow.group(), where + ".measures");
  Measure nu;
  const Json nu_spec = s.contains("nu") ? s["nu"] : Json{{"haar_average", {{"uniform", true}}}};
  if (nu_spec.is_object() && nu_spec.contains("haar_average")) {
    nu = haar_average(flow, io::measure_from_json(nu_spec["haar_average"], flow.space().size(),
                                                  where + ".nu.haar_average"));
  } else {
    nu = io::measure_from_json(nu_spec, flow.space().size(), where + ".nu");
  }
  std::vector<Index> e;
  if (!s.contains("E") || s["E"] == "all") {
    for (Index g = 0; g < flow.group().order(); ++g) e.push_back(g);
  } else {
    for (std::size_t g : get_sizes(s["E"], where + ".E")) {
      if (g >= flow.group().order()) config_error(where + ".E", "element outside the group");
      e.push_back(g);
    }
  }

  OrbitBoundOptions opt;
  opt.alphas = get_alphas(s, opt.alphas, where);
  opt.tail_fraction = get_double(s, "tail_fraction", opt.tail_fraction, where);
  opt.use_oracle = ctx.oracle || get_bool(s, "use_oracle", opt.use_oracle, where);
  opt.tol = get_double(s, "tol", opt.tol, where);
  opt.invariance_tol = get_double(s, "invariance_tol", opt.invariance_tol, where);
  opt.obs = obs_options(s.contains("obs") ? s["obs"] : Json::object(), ctx, where + ".obs");
  opt.obs.use_oracle = opt.use_oracle;

  Stopwatch sw;
  row.report = verify_orbit_bound(flow, measures, nu, e, opt);
  row.x0 = least_displaced_point(flow);
  row.ms = sw.ms();
  row.x0_label = flow.space().labels()[row.x0.x0];
  return row;
}

RunResult run_flow_check(const Json& config, const Context& ctx) {
  const Json& list = field(config, "scenarios", "config");
  if (!list.is_array() || list.empty()) config_error("scenarios", "expected a non-empty array");

  std::vector<std::optional<FlowRow>> rows(list.size());
  std::vector<std::string> errors(list.size());
  parallel_for(list.size(), ctx.threads, [&](std::size_t i) {
    const std::string where = "scenarios[" + std::to_string(i) + "]";
    try {
      rows[i] = run_flow_scenario(list[i], where, ctx);
    } catch (const Error& e) {
      // Config mistakes abort the batch; numerical failures are per-row.
      if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::UnknownGenerator)
        errors[i] = std::string("!") + e.what();
      else
        errors[i] = e.what();
    }
  });
  for (const auto& err : errors)
    if (!err.empty() && err[0] == '!') throw Error(ErrorKind::ConfigError, err.substr(1));

  RunResult result;
  io::CsvTable table({"scenario", "lhs", "rhs", "alpha_star", "certified", "x0", "x0_value", "runtime_ms"});
  io::CsvTable series({"scenario", "alpha", "i", "value", "defect", "in_tail"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) {
      result.errors.push_back({i, errors[i]});
      continue;
    }
    const FlowRow& r = *rows[i];
    const auto& rep = r.report;
    table.add_row({r.name, io::format_double(rep.lhs), io::format_double(rep.rhs),
                   io::format_double(rep.alpha_star), rep.certified ? "true" : "false", r.x0_label,
                   io::format_double(r.x0.value), runtime_field(ctx, r.ms)});
    for (std::size_t a = 0; a < rep.series.size(); ++a)
      for (std::size_t k = 0; k < rep.series[a].size(); ++k)
        series.add_row({r.name, io::format_double(list[i].contains("alphas")
                                                      ? list[i]["alphas"][a].get<double>()
                                                      : OrbitBoundOptions{}.alphas[a]),
                        std::to_string(k), io::format_double(rep.series[a][k]),
                        io::format_double(rep.defects[k]), k >= rep.tail_start ? "true" : "false"});
    if (rep.violated())
      result.assertion_failures.push_back(r.name + ": lhs " + io::format_double(rep.lhs) +
                                          " exceeds the certified rhs " + io::format_double(rep.rhs));
    if (rep.certified && r.x0.value > rep.rhs + kAssertTol)
      result.assertion_failures.push_back(r.name + ": no point within the certified rhs (best " +
                                          io::format_double(r.x0.value) + ")");
  }
  result.tables.push_back({"flow-check", std::move(table)});
  result.tables.push_back({"flow-series", std::move(series)});
  return result;
}

// ----------------------------------------------------------- concentrate

RunResult run_concentrate(const Json& config, const Context& ctx) {
  std::vector<MmSpace> sequence;
  std::vector<PointMap> maps;
  std::optional<MmSpace> target;
  if (config.contains("family")) {
    // Hypercubes {0,1}^n projected onto their first coordinate.
    const Json& fam = config["family"];
    if (generator_name(fam) != "hypercube")
      throw Error(ErrorKind::UnknownGenerator, "family: concentrate supports the hypercube family");
    for (std::size_t n : get_sizes(field(fam, "n", "family"), "family.n")) {
      if (n == 0) config_error("family.n", "dimension must be positive");
      auto m = family_from_json(Json{{"generator", "hypercube"}, {"n", n}}, "family", nullptr);
      std::vector<Index> image(m[0].size());
      for (Index k = 0; k < image.size(); ++k) image[k] = k & 1;
      maps.emplace_back(2, std::move(image));
      sequence.push_back(std::move(m[0]));
    }
    target.emplace(hypercube_hamming_space(1), Measure::uniform(2));
  } else {
    target.emplace(mm_from_json(field(config, "target", "config"), "target"));
    const Json& list = field(config, "sequence", "config");
    if (!list.is_array() || list.empty()) config_error("sequence", "expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "sequence[" + std::to_string(i) + "]";
      sequence.push_back(mm_from_json(list[i], where));
      const auto image = get_sizes(field(list[i], "map", where), where + ".map");
      try {
        maps.emplace_back(target->size(), image);
      } catch (const Error& e) {
        config_error(where + ".map", e.what());
      }
    }
  }
  const std::size_t budget = get_size(config, "budget", 64, "config");

  RunResult result;
  io::CsvTable table({"index", "prokhorov", "lip_target_to_source_upper",
                      "lip_source_to_target_lower", "runtime_ms"});
  // Rows are computed one by one so a failing row does not sink the batch.
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    Stopwatch sw;
    try {
      auto rows = concentration_criterion(std::span(&sequence[i], 1), *target,
                                          std::span(&maps[i], 1), budget, ctx.seed, ctx.threads);
      const auto& r = rows.front();
      table.add_row({std::to_string(i), io::format_double(r.prokhorov),
                     io::format_double(r.lip_target_to_source_upper),
                     io::format_double(r.lip_source_to_target_lower), runtime_field(ctx, sw.ms())});
    } catch (const Error& e) {
      result.errors.push_back({i, e.what()});
    }
  }
  result.tables.push_back({"concentrate", std::move(table)});
  return result;
}

// -------------------------------------------------------------- generate

RunResult run_generate(const Json& config, const Context&) {
  Json out = Json::object();
  if (config.contains("space")) out["space"] = io::to_json(io::space_from_json(config["space"], "space"));
  if (config.contains("group")) {
    auto g = io::group_from_json(config["group"], "group");
    out["group"] = io::to_json(g.group, g.metric ? &g.metric->base() : nullptr);
  }
  if (config.contains("flow")) out["flow"] = io::to_json(io::flow_from_json(config["flow"], "flow"));
  if (config.contains("measure")) {
    std::size_t n = 0;
    if (config.contains("space"))
      n = io::space_from_json(config["space"], "space").size();
    else if (config.contains("n"))
      n = get_size(config, "n", 0, "config");
    else
      config_error("measure", "needs \"space\" or \"n\" for the carrier size");
    out["measure"] = io::to_json(io::measure_from_json(config["measure"], n, "measure"));
  }
  if (out.empty()) config_error("config", "generate needs space, measure, group or flow");
  RunResult result;
  result.documents.emplace_back("generated", std::move(out));
  return result;
}

}  // namespace

int RunResult::exit_code() const noexcept {
  if (!assertion_failures.empty()) return 2;
  if (!errors.empty()) return 3;
  return 0;
}

RunResult run_scenario(const Json& config, const RunOptions& options) {
  if (!config.is_object()) config_error("config", "expected an object");
  const Json& cmd_json = field(config, "command", "config");
  if (!cmd_json.is_string()) config_error("command", "expected a string");
  const std::string command = cmd_json.get<std::string>();

  Context ctx;
  ctx.seed = options.seed ? *options.seed : get_size(config, "seed", 1, "config");
  ctx.threads = options.threads ? *options.threads : get_size(config, "threads", 1, "config");
  if (ctx.threads == 0) ctx.threads = 1;
  ctx.oracle = options.oracle;
  ctx.timing = options.timing;

  static const std::map<std::string, std::function<RunResult(const Json&, const Context&)>> kRunners{
      {"mmdist", run_mmdist},
      {"obsdiam", run_obsdiam},
      {"levy-scan", run_levy_scan},
      {"invariance-defect", run_invariance_defect},
      {"flow-check", run_flow_check},
      {"concentrate", run_concentrate},
      {"generate", run_generate},
  };
  auto it = kRunners.find(command);
  if (it == kRunners.end()) config_error("command", "unknown command \"" + command + "\"");

  RunResult result = it->second(config, ctx);
  result.command = command;

  Json tables = Json::array();
  for (const auto& t : result.tables)
    tables.push_back({{"name", t.name}, {"file", t.name + ".csv"}, {"rows", t.table.rows().size()}});
  Json documents = Json::array();
  for (const auto& d : result.documents) documents.push_back(d.first + ".json");
  Json errors = Json::array();
  for (const auto& e : result.errors) errors.push_back({{"row", e.row}, {"message", e.message}});
  result.manifest = Json{{"tool", "mmconc"},
                         {"version", kToolVersion},
                         {"command", command},
                         {"seed", ctx.seed},
                         {"threads", ctx.threads},
                         {"oracle", ctx.oracle},
                         {"timing", ctx.timing},
                         {"config", config},
                         {"tables", std::move(tables)},
                         {"documents", std::move(documents)},
                         {"errors", std::move(errors)},
                         {"assertion_failures", result.assertion_failures},
                         {"exit_code", result.exit_code()}};
  return result;
}

std::vector<std::string> builtin_names() {
  return {"hypercube-levy", "z3-regular", "sym-chain", "flow-suite"};
}

namespace {

Json regular_scenario(const std::string& name, Json group) {
  return Json{{"name", name},
              {"flow", {{"generator", "regular"}, {"group", std::move(group)}}},
              {"measures", {{"haar", 2}}},
              {"nu", {{"haar_average", {{"uniform", true}}}}},
              {"E", "all"}};
}

Json flow_suite() {
  Json scenarios = Json::array();
  const Json path3{{"labels", {"a", "b", "c"}}, {"dist", {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}}};
  scenarios.push_back({{"name", "trivial-z3-path3"},
                       {"flow", {{"generator", "trivial"},
                                 {"group", {{"generator", "cyclic"}, {"n", 3}}},
                                 {"space", path3}}},
                       {"measures", {{"haar", 2}}},
                       {"nu", {{"uniform", true}}}});
  scenarios.push_back({{"name", "trivial-sym3-cycle4"},
                       {"flow", {{"generator", "trivial"},
                                 {"group", {{"generator", "sym"}, {"n", 3}}},
                                 {"space", {{"generator", "cyclic"}, {"n", 4}, {"metric", "geodesic"}}}}},
                       {"measures", {{"haar", 2}}},
                       {"nu", {{"point_mass", 0}}}});
  for (int n = 3; n <= 8; ++n)
    scenarios.push_back(regular_scenario(
        "z" + std::to_string(n) + "-regular",
        {{"generator", "cyclic"}, {"n", n}, {"metric", "geodesic"}}));
  scenarios.push_back({{"name", "z4-cycle-apex-uniform"},
                       {"flow", {{"generator", "cycle_with_apex"}, {"n", 4}}},
                       {"measures", {{"haar", 2}}},
                       {"nu", {{"haar_average", {{"uniform", true}}}}}});
  scenarios.push_back({{"name", "z4-cycle-apex-fixed"},
                       {"flow", {{"generator", "cycle_with_apex"}, {"n", 4}}},
                       {"measures", {{"haar", 2}}},
                       {"nu", {{"haar_average", {{"point_mass", 4}}}}}});
  scenarios.push_back(regular_scenario("sym3-regular", {{"generator", "sym"}, {"n", 3}}));
  scenarios.push_back(regular_scenario("sym4-regular", {{"generator", "sym"}, {"n", 4}}));
  Json perturbed = regular_scenario("z5-regular-perturbed",
                                    {{"generator", "cyclic"}, {"n", 5}, {"metric", "geodesic"}});
  perturbed["measures"] = {{"perturbed_haar", {{"count", 6}, {"at", 0}}}};
  scenarios.push_back(std::move(perturbed));
  return Json{{"command", "flow-check"}, {"seed", 1}, {"scenarios", std::move(scenarios)}};
}

}  // namespace

Json builtin_config(const std::string& name) {
  if (name == "hypercube-levy")
    return Json{{"command", "levy-scan"},
                {"seed", 1},
                {"family", {{"generator", "hypercube"}, {"n", {2, 3, 4, 5, 6, 7, 8, 9, 10}}}},
                {"alphas", {0.1, 0.3, 0.5}},
                {"oracle", true}};
  if (name == "z3-regular") {
    Json s = regular_scenario("z3-regular", {{"generator", "cyclic"}, {"n", 3}, {"metric", "geodesic"}});
    s["E"] = {1};
    return Json{{"command", "flow-check"}, {"seed", 1}, {"scenarios", {s}}};
  }
  if (name == "sym-chain")
    return Json{{"command", "obsdiam"},
                {"seed", 1},
                {"family", {{"generator", "sym"}, {"n", {3, 4, 5, 6}}}},
                {"alphas", {0.1, 0.3, 0.5}}};
  if (name == "flow-suite") return flow_suite();
  throw Error(ErrorKind::UnknownGenerator, "unknown builtin scenario \"" + name + "\"");
}

void write_outputs(const RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::ConfigError, dir + ": cannot create output directory");
  auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream out(fs::path(dir) / file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::ConfigError, dir + "/" + file + ": cannot write");
    out << text;
  };
  for (const auto& t : result.tables) write(t.name + ".csv", t.table.str());
  for (const auto& [stem, doc] : result.documents) write(stem + ".json", doc.dump(2) + "\n");
  write("manifest.json", result.manifest.dump(2) + "\n");
}

}  // namespace mmconc::scenarios
