#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "mmconc/io.hpp"
#include "mmconc/scenarios.hpp"
#include "support.hpp"

using namespace mmconc;
using io::Json;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an mmconc::Error");
  return ErrorKind::InvalidArgument;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Json reparse(const Json& j) { return Json::parse(j.dump()); }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("generator examples") {
    const auto h1 = io::space_from_json(Json::parse(R"({"generator": "hypercube", "n": 1})"));
    CHECK(h1.size() == 2);
    CHECK(h1(0, 1) == 1.0);

    const auto c4 = io::space_from_json(Json::parse(R"({"generator": "cyclic", "n": 4, "metric": "geodesic"})"));
    CHECK(c4.matrix() == std::vector<double>{0, 1, 2, 1, 1, 0, 1, 2, 2, 1, 0, 1, 1, 2, 1, 0});

    const auto s3 = io::space_from_json(Json::parse(R"({"generator": "sym", "n": 3})"));
    CHECK(s3.size() == 6);
    CHECK(s3(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    const auto g = io::group_from_json(Json::parse(R"({"generator": "cyclic", "n": 4})"));
    CHECK(g.name == "z4");
    REQUIRE(g.metric);
    CHECK(g.metric->base().diameter() == 1.0);

    const auto w = io::group_from_json(Json::parse(R"({"generator": "sym", "n": 3, "metric": {"weighted": [0.5, 0.25, 0.25]}})"));
    CHECK(w.metric->base()(0, 1) == 0.5);
  }

  TEST_CASE("measure schemas") {
    CHECK(io::measure_from_json(Json::parse(R"({"uniform": true})"), 4) == Measure::uniform(4));
    CHECK(io::measure_from_json(Json::parse(R"({"point_mass": 2})"), 4) == Measure::point_mass(4, 2));
    const auto p = io::measure_from_json(Json::parse(R"({"product": [[0.25, 0.75], [0.5, 0.5]]})"), 4);
    CHECK(p.weights() == std::vector<double>{0.125, 0.375, 0.125, 0.375});
    CHECK(io::measure_from_json(Json::parse(R"({"normalized": [1, 3]})"), 2).weights() ==
          std::vector<double>{0.25, 0.75});
    CHECK(kind_of([] { io::measure_from_json(Json::parse(R"({"weights": [0.5, 0.6]})"), 2); }) ==
          ErrorKind::ConfigError);
    CHECK(kind_of([] { io::measure_from_json(Json::parse(R"({"point_mass": 4})"), 4); }) ==
          ErrorKind::ConfigError);
  }

  TEST_CASE("errors name the offending field") {
    CHECK(kind_of([] { io::space_from_json(Json::parse(R"({"generator": "torus", "n": 2})")); }) ==
          ErrorKind::UnknownGenerator);
    const auto msg = message_of([] { io::space_from_json(Json::parse(R"({"dist": [[0, 1], [1, "x"]]})")); });
    CHECK(msg.find("space.dist[1][1]") != std::string::npos);
    const auto missing = message_of([] { io::flow_from_json(Json::parse(R"({"generator": "regular"})")); });
    CHECK(missing.find("\"group\"") != std::string::npos);
    const auto asym = message_of([] { io::space_from_json(Json::parse(R"({"dist": [[0, 1], [2, 0]]})")); });
    CHECK(asym.find("ConfigError") == 0);
    const auto parse = message_of([] { io::parse_json("{\n  \"a\": [1,,2]\n}", "cfg.json"); });
    CHECK(parse.find("cfg.json:2:") != std::string::npos);
  }

  TEST_CASE("generated objects survive a JSON round trip") {
    const std::vector<const char*> spaces{
        R"({"generator": "hypercube", "n": 4})",
        R"({"generator": "cyclic", "n": 7, "metric": "normalized_geodesic"})",
        R"({"generator": "sym", "n": 4, "metric": {"weighted": [0.1, 0.2, 0.3, 0.4]}})",
        R"({"generator": "euclidean", "points": [[0.1, 0.7], [0.3, 0.3], [1e-9, 2.5]]})"};
    for (const char* spec : spaces) {
      const auto x = io::space_from_json(Json::parse(spec));
      const auto back = io::space_from_json(reparse(io::to_json(x)));
      CHECK(back == x);
      CHECK(same_bits(back.matrix(), x.matrix()));
    }
    for (const char* spec : {R"({"generator": "sym", "n": 4})", R"({"generator": "cyclic", "n": 6})",
                             R"({"generator": "hypercube", "n": 3})"}) {
      const auto g = io::group_from_json(Json::parse(spec));
      const auto back = io::group_from_json(reparse(io::to_json(g.group, &g.metric->base())));
      CHECK(back.group == g.group);
      CHECK(back.metric->base() == g.metric->base());
    }
    for (const char* spec : {R"({"generator": "regular", "group": {"generator": "sym", "n": 3}})",
                             R"({"generator": "coset", "group": {"generator": "sym", "n": 4}, "subgroup": [1, 2]})",
                             R"({"generator": "cycle_with_apex", "n": 5})"}) {
      const auto f = io::flow_from_json(Json::parse(spec));
      const auto back = io::flow_from_json(reparse(io::to_json(f)));
      CHECK(back.group() == f.group());
      CHECK(back.space() == f.space());
      CHECK(back.action_table() == f.action_table());
    }
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const auto mu = testing::random_measure(9, rng, true);
      const auto back = io::measure_from_json(reparse(io::to_json(mu)), 9);
      CHECK(same_bits(back.weights(), mu.weights()));
      const auto x = testing::random_space(6, rng);
      CHECK(io::space_from_json(reparse(io::to_json(x))) == x);
    }
  }

  TEST_CASE("shortest round-trip decimals") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(io::format_double(std::nan("")) == "nan");
    Rng rng(32);
    for (int i = 0; i < 1000; ++i) {
      const double v = std::ldexp(rng.uniform(), static_cast<int>(rng.below(80)) - 40);
      CHECK(std::stod(io::format_double(v)) == v);
    }
  }

  TEST_CASE("CSV quoting and line endings") {
    io::CsvTable t({"a", "b"});
    t.add_row({"plain", "with,comma"});
    t.add_row({"say \"hi\"", "two\nlines"});
    CHECK(t.str() == "a,b\nplain,\"with,comma\"\n\"say \"\"hi\"\"\",\"two\nlines\"\n");
    CHECK(kind_of([&] { t.add_row({"one"}); }) == ErrorKind::DimensionMismatch);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("z3 builtin reproduces equality") {
    const auto r = scenarios::run_scenario(scenarios::builtin_config("z3-regular"));
    REQUIRE(r.tables.front().table.rows().size() == 1);
    const auto& row = r.tables.front().table.rows().front();
    CHECK(row[0] == "z3-regular");
    CHECK(row[1] == "1");
    CHECK(row[2] == "1");
    CHECK(row[4] == "true");
    CHECK(row[7] == "");
    CHECK(r.exit_code() == 0);
  }

  TEST_CASE("builtins are byte-identical across runs") {
    for (const auto& name : scenarios::builtin_names()) {
      if (name == "hypercube-levy") continue;  // covered by the acceptance suite
      const auto a = scenarios::run_scenario(scenarios::builtin_config(name));
      const auto b = scenarios::run_scenario(scenarios::builtin_config(name));
      REQUIRE(a.tables.size() == b.tables.size());
      for (std::size_t t = 0; t < a.tables.size(); ++t) CHECK(a.tables[t].table.str() == b.tables[t].table.str());
      CHECK(a.manifest.dump() == b.manifest.dump());
      CHECK(a.exit_code() == 0);
    }
    CHECK(kind_of([] { scenarios::builtin_config("nope"); }) == ErrorKind::UnknownGenerator);
  }

  TEST_CASE("thread count does not change results") {
    const auto cfg = scenarios::builtin_config("flow-suite");
    scenarios::RunOptions one, four;
    one.threads = 1;
    four.threads = 4;
    CHECK(scenarios::run_scenario(cfg, one).tables.front().table.str() ==
          scenarios::run_scenario(cfg, four).tables.front().table.str());
  }

  TEST_CASE("outputs and manifest") {
    const auto dir = std::filesystem::temp_directory_path() / "mmconc_io_test";
    std::filesystem::remove_all(dir);
    const auto r = scenarios::run_scenario(Json::parse(R"({
      "command": "obsdiam", "space": {"generator": "cyclic", "n": 4, "metric": "geodesic"},
      "alphas": [0.2], "oracle": true})"));
    scenarios::write_outputs(r, dir.string());
    CHECK(read_file(dir / "obsdiam.csv") == r.tables.front().table.str());
    const auto manifest = Json::parse(read_file(dir / "manifest.json"));
    CHECK(manifest["tool"] == "mmconc");
    CHECK(manifest["command"] == "obsdiam");
    CHECK(manifest["tables"][0]["rows"] == 1);
    CHECK(std::filesystem::exists(dir / "witnesses.json"));
    // All four atoms are needed at alpha 0.2; the value is the diameter.
    CHECK(r.tables.front().table.rows().front()[4] == "2");
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("row failures and assertion failures map to exit codes") {
    const auto partial = scenarios::run_scenario(Json::parse(R"({
      "command": "flow-check", "scenarios": [
        {"name": "ok", "flow": {"generator": "cycle_with_apex", "n": 4}},
        {"name": "not-invariant", "flow": {"generator": "cycle_with_apex", "n": 4},
         "nu": {"point_mass": 0}}]})"));
    CHECK(partial.tables.front().table.rows().size() == 1);
    REQUIRE(partial.errors.size() == 1);
    CHECK(partial.errors.front().row == 1);
    CHECK(partial.exit_code() == 3);

    // A point-mass sequence is far from invariant, so its certified
    // right-hand side collapses and the check reports the violation.
    const auto violated = scenarios::run_scenario(Json::parse(R"({
      "command": "flow-check", "scenarios": [
        {"name": "dirac", "flow": {"generator": "regular", "group": {"generator": "cyclic", "n": 3}},
         "measures": [{"point_mass": 0}]}]})"));
    CHECK(violated.exit_code() == 2);

    CHECK(kind_of([] { scenarios::run_scenario(Json::parse(R"({"command": "fly"})")); }) ==
          ErrorKind::ConfigError);
    CHECK(kind_of([] {
            scenarios::run_scenario(Json::parse(R"({"command": "flow-check", "scenarios": [{"flow": {"generator": "spiral"}}]})"));
          }) == ErrorKind::ConfigError);
  }

  TEST_CASE("generate emits explicit objects") {
    const auto r = scenarios::run_scenario(Json::parse(R"({
      "command": "generate", "space": {"generator": "hypercube", "n": 2},
      "measure": {"product": [[0.5, 0.5], [0.25, 0.75]]}})"));
    const auto& doc = r.documents.front().second;
    CHECK(doc["space"]["dist"].size() == 4);
    CHECK(doc["measure"]["weights"][3] == 0.375);
  }

  TEST_CASE("mmdist rows") {
    const auto r = scenarios::run_scenario(Json::parse(R"({
      "command": "mmdist", "space": {"generator": "cyclic", "n": 4, "metric": "geodesic"},
      "mu": {"point_mass": 0}, "nu": {"point_mass": 1}})"));
    const auto& rows = r.tables.front().table.rows();
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "mt");
    CHECK(rows[0][1] == "1");
    CHECK(rows[1][0] == "prokhorov");
    CHECK(rows[1][1] == "1");
  }
}
