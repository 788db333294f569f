#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmconc/io.hpp"

namespace mmconc::scenarios {

inline constexpr const char* kToolVersion = "0.1.0";

/// Command-line overrides; unset fields fall back to the config, then to the
/// owning module's defaults.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool oracle = false;
  /// Fill runtime_ms columns. Off by default so reports are reproducible.
  bool timing = false;
};

struct NamedTable {
  std::string name;
  io::CsvTable table;
};

struct RowError {
  std::size_t row = 0;
  std::string message;
};

struct RunResult {
  std::string command;
  std::vector<NamedTable> tables;
  /// Non-table outputs as (file stem, document): generated objects, witnesses.
  std::vector<std::pair<std::string, io::Json>> documents;
  std::vector<RowError> errors;
  /// Human-readable descriptions of violated invariants.
  std::vector<std::string> assertion_failures;
  io::Json manifest;

  /// 0 ok, 2 assertion failure, 3 partial failure.
  int exit_code() const noexcept;
};

/// Dispatches on config["command"]: mmdist, obsdiam, levy-scan,
/// invariance-defect, flow-check, concentrate, generate. Throws ConfigError
/// for malformed configs; per-row failures are collected in errors.
RunResult run_scenario(const io::Json& config, const RunOptions& options = {});

/// Names accepted by builtin_config.
std::vector<std::string> builtin_names();
/// Ready-made configs: hypercube-levy, z3-regular, sym-chain,
/// flow-suite. Throws UnknownGenerator.
io::Json builtin_config(const std::string& name);

/// Writes <dir>/<table>.csv for every table, <stem>.json for every document,
/// and manifest.json. Creates dir if needed.
void write_outputs(const RunResult& result, const std::string& dir);

}  // namespace mmconc::scenarios
