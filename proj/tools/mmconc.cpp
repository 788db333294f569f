// mmconc: command-line front end to the scenario runner.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mmconc/scenarios.hpp"

namespace {

using mmconc::io::Json;
namespace sc = mmconc::scenarios;

struct Common {
  std::string config_file;
  std::string config_text;
  std::string builtin;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool oracle = false;
  bool timing = false;
};

struct MmdistFlags {
  std::string space, mu, nu, metric;
};

void add_common(CLI::App* sub, Common& c) {
  auto* cfg = sub->add_option("--config", c.config_file, "JSON scenario file");
  auto* json = sub->add_option("--json", c.config_text, "Inline JSON scenario");
  auto* builtin = sub->add_option("--builtin", c.builtin, "Built-in scenario name");
  cfg->excludes(json)->excludes(builtin);
  json->excludes(builtin);
  sub->add_option("--out", c.out_dir, "Directory for CSV tables and manifest.json");
  sub->add_option("--seed", c.seed, "Seed overriding the config");
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--oracle", c.oracle, "Attach exact oracle values where they apply");
  sub->add_flag("--timing", c.timing, "Fill runtime_ms columns");
}

Json load_config(const std::string& command, const Common& c, const MmdistFlags& m) {
  Json config;
  if (!c.builtin.empty()) {
    config = sc::builtin_config(c.builtin);
  } else if (!c.config_file.empty()) {
    config = mmconc::io::read_json_file(c.config_file);
  } else if (!c.config_text.empty()) {
    config = mmconc::io::parse_json(c.config_text, "--json");
  } else {
    config = Json::object();
  }
  if (!config.is_object()) throw mmconc::Error(mmconc::ErrorKind::ConfigError, "config: expected an object");
  if (command == "mmdist") {
    if (!m.space.empty()) config["space"] = mmconc::io::read_json_file(m.space);
    if (!m.mu.empty()) config["mu"] = mmconc::io::read_json_file(m.mu);
    if (!m.nu.empty()) config["nu"] = mmconc::io::read_json_file(m.nu);
    if (!m.metric.empty()) config["metric"] = m.metric;
  }
  if (config.contains("command") && config["command"] != command)
    throw mmconc::Error(mmconc::ErrorKind::ConfigError,
                        "config: command " + config["command"].dump() + " does not match " + command);
  config["command"] = command;
  return config;
}

int run(const std::string& command, const Common& c, const MmdistFlags& m) {
  try {
    const Json config = load_config(command, c, m);
    sc::RunOptions options;
    options.seed = c.seed;
    options.threads = c.threads;
    options.oracle = c.oracle;
    options.timing = c.timing;
    const sc::RunResult result = sc::run_scenario(config, options);

    if (!c.out_dir.empty()) {
      sc::write_outputs(result, c.out_dir);
    } else if (!result.tables.empty()) {
      std::cout << result.tables.front().table.str();
    }
    if (c.out_dir.empty() && command == "generate")
      for (const auto& [stem, doc] : result.documents) std::cout << doc.dump(2) << "\n";

    for (const auto& e : result.errors) std::cerr << "row " << e.row << ": " << e.message << "\n";
    for (const auto& a : result.assertion_failures) std::cerr << "assertion failed: " << a << "\n";
    return result.exit_code();
  } catch (const mmconc::Error& e) {
    std::cerr << e.what() << "\n";
    if (e.kind() == mmconc::ErrorKind::ConfigError || e.kind() == mmconc::ErrorKind::UnknownGenerator)
      return 1;
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric-measure concentration toolkit"};
  app.require_subcommand(1);
  Common common;
  MmdistFlags mm;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"mmdist", "Mass transportation and Prokhorov distance between two measures"},
      {"obsdiam", "Observable diameter lower bounds (and oracle values) over an alpha grid"},
      {"levy-scan", "Observable diameter table over a sequence of spaces with decay fits"},
      {"invariance-defect", "Translation defects of a measure on a finite group"},
      {"flow-check", "Orbit displacement against observable diameters on finite flows"},
      {"concentrate", "Map-based concentration criterion for a sequence of spaces"},
      {"generate", "Expand generators into explicit JSON objects"},
  };
  std::string chosen;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, common);
    if (name == "mmdist") {
      sub->add_option("--space", mm.space, "Space JSON file");
      sub->add_option("--mu", mm.mu, "Measure JSON file");
      sub->add_option("--nu", mm.nu, "Measure JSON file");
      sub->add_option("--metric", mm.metric, "mt, prokhorov or both")
          ->check(CLI::IsMember({"mt", "prokhorov", "both"}));
    }
    sub->callback([&chosen, name = name] { chosen = name; });
  }
  app.footer("Built-in scenarios: hypercube-levy, z3-regular, sym-chain, flow-suite.\n"
             "Exit codes: 0 ok, 1 config error, 2 assertion failure, 3 partial failure.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return run(chosen, common, mm);
}
