#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "udnmob/acceptance.hpp"
#include "udnmob/app.hpp"
#include "udnmob/presets.hpp"

using namespace udnmob;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("udnmob_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_scenario(const fs::path& dir, const std::string& text) {
  const auto p = dir / "scenario.json";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("run options are validated before anything runs") {
  RunOptions o;
  CHECK_THROWS_AS(build_experiments(o), ConfigError);
  o.preset = "fig3";
  o.scenario = "x.json";
  CHECK_THROWS_AS(build_experiments(o), ConfigError);
  o.preset.reset();
  CHECK_THROWS_AS(build_experiments(o), ConfigError);  // no algorithms, missing file
  o.scenario.reset();
  o.preset = "fig9";
  CHECK_THROWS_AS(build_experiments(o), ConfigError);
}

TEST_CASE("run writes trace and summary CSVs") {
  const auto dir = scratch("run");
  const auto scenario = write_scenario(dir, R"({
    "name": "two_arm_gap", "N": 2, "T": 400, "E_s": 0.1,
    "generator": {"type": "constant", "means": [0.1, 0.9]}
  })");
  RunOptions o;
  o.scenario = scenario.string();
  o.algos = {"brew", "macro"};
  o.repetitions = 2;
  o.stride = 100;
  o.out = (dir / "out").string();
  std::ostringstream log, err;
  REQUIRE(cmd_run(o, log, err) == kExitOk);
  CHECK(err.str().empty());
  std::ifstream summary(dir / "out" / "summary.csv");
  std::string line;
  int rows = -1;
  while (std::getline(summary, line)) ++rows;
  CHECK(rows == 2);
  std::ifstream trace(dir / "out" / "trace.csv");
  rows = -1;
  while (std::getline(trace, line)) ++rows;
  CHECK(rows == 2 * 2 * 4);
  fs::remove_all(dir);
}

TEST_CASE("a bad configuration leaves no output behind") {
  const auto dir = scratch("bad");
  const auto scenario = write_scenario(dir, R"({"N": 2, "T": 100, "E_s": 0.1})");
  RunOptions o;
  o.scenario = scenario.string();
  o.algos = {"brew:tau=zero"};
  o.out = (dir / "out").string();
  std::ostringstream log, err;
  CHECK(cmd_run(o, log, err) == kExitConfig);
  CHECK(err.str().find("error") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
  fs::remove_all(dir);
}

TEST_CASE("output directory defaults to the environment variable") {
  ::setenv(kOutputDirEnv, "/tmp/udnmob_elsewhere", 1);
  CHECK(default_output_dir() == "/tmp/udnmob_elsewhere");
  ::unsetenv(kOutputDirEnv);
  CHECK(default_output_dir() == "out");
}

TEST_CASE("presets") {
  CHECK(preset_names() == std::vector<std::string>{"fig3", "fig4", "fig5", "fig6", "fig7"});
  PresetOptions o;
  o.horizon = 100;
  o.repetitions = 1;
  for (const auto& name : preset_names()) {
    const auto grid = make_preset(name, o);
    REQUIRE_FALSE(grid.empty());
    std::set<std::string> ids;
    for (const auto& e : grid) {
      CHECK(e.id.rfind(name, 0) == 0);
      CHECK(e.scenario.horizon == 100);
      CHECK(e.repetitions == 1);
      CHECK_FALSE(e.policies.empty());
      ids.insert(e.id);
    }
    CHECK(ids.size() == grid.size());
  }
  CHECK_THROWS_AS(make_preset("fig2", o), ConfigError);
}

TEST_CASE("criterion filters") {
  CHECK(criterion_selected("", 4, "theorem2_delay"));
  CHECK(criterion_selected("1,4", 4, "theorem2_delay"));
  CHECK_FALSE(criterion_selected("1,5", 4, "theorem2_delay"));
  CHECK(criterion_selected("DELAY", 4, "theorem2_delay"));
  std::ostringstream out;
  CHECK(cmd_verify("no_such_criterion", out, 1) == kExitConfig);
}

TEST_CASE("simulator sanity criterion passes on its own") {
  std::ostringstream out;
  CHECK(cmd_verify("9", out, 1) == kExitOk);
  CHECK(out.str().find("PASS") != std::string::npos);
}
