#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "expord/run.hpp"
#include "expord/scenario.hpp"

using namespace expord;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = EXPORD_SCENARIO_DIR;
const fs::path kTestData = EXPORD_TEST_DATA_DIR;

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("expord_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("scenario parsing and lossless round trip") {
  const Scenario s = load_scenario(kScenarios / "constant_scalar.json");
  CHECK(s.stem == "constant_scalar");
  CHECK(s.model.patches() == 1);
  CHECK(s.model.delays[0] == 0.3);
  CHECK(s.model.birth[0](0.0) == 2.0);
  REQUIRE(s.verify.has_value());
  CHECK(s.verify->monotone_pairs == 20);
  CHECK(s.sim.histories.size() == 2);

  const nlohmann::json j1 = scenario_to_json(s);
  const Scenario s2 = scenario_from_json(j1, s.stem);
  const nlohmann::json j2 = scenario_to_json(s2);
  CHECK(j1 == j2);
}

TEST_CASE("unknown keys and malformed files are rejected") {
  CHECK_THROWS_AS(load_scenario(kTestData / "unknown_key.json"),
                  ScenarioParseError);
  CHECK_THROWS_AS(load_scenario(kTestData / "malformed.json"),
                  ScenarioParseError);
  CHECK_THROWS_AS(load_scenario(kTestData / "no_such_file.json"),
                  ScenarioParseError);
  try {
    load_scenario(kTestData / "malformed.json");
  } catch (const ScenarioParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("check command and the policy gate") {
  const auto out = temp_dir("check");
  RunOptions opts;
  opts.out_dir = out;
  CHECK(run_scenario(kScenarios / "constant_scalar.json", "check", opts) ==
        kExitPass);
  const auto report_path = out / "constant_scalar.check.conditions.json";
  REQUIRE(fs::exists(report_path));
  const auto j = nlohmann::json::parse(slurp(report_path));
  const double value = j["monotone"]["entries"][1]["certified"][0];
  CHECK(value == doctest::Approx(0.6 * std::exp(0.3)).epsilon(1e-12));
  CHECK(j["monotone"]["entries"][1]["verdict"] == "holds-strict");
  CHECK(j["superequilibrium_radius"]["radius"].get<double>() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-9));

  // Oscillating decay: strict gate fails, relaxed gate passes.
  CHECK(run_scenario(kScenarios / "bigosc_relaxed.json", "check", opts) ==
        kExitFail);
  opts.policy = Policy::Relaxed;
  CHECK(run_scenario(kScenarios / "bigosc_relaxed.json", "check", opts) ==
        kExitPass);

  // A model failing both routes exits 1 either way.
  CHECK(run_scenario(kScenarios / "monotone_fails.json", "check", opts) ==
        kExitFail);
  opts.policy = Policy::Strict;
  CHECK(run_scenario(kScenarios / "monotone_fails.json", "check", opts) ==
        kExitFail);
  CHECK(run_scenario(kScenarios / "invalid_decay.json", "check", opts) ==
        kExitFail);
}

TEST_CASE("parse failures exit with the usage code") {
  const auto out = temp_dir("usage");
  RunOptions opts;
  opts.out_dir = out;
  CHECK(run_scenario(kTestData / "malformed.json", "check", opts) ==
        kExitUsage);
  CHECK(run_scenario(kScenarios / "constant_scalar.json", "frobnicate",
                     opts) == kExitUsage);
}

TEST_CASE("simulate writes trajectory files with the fixed schema") {
  const auto out = temp_dir("simulate");
  RunOptions opts;
  opts.out_dir = out;
  CHECK(run_scenario(kScenarios / "constant_scalar.json", "simulate", opts) ==
        kExitPass);
  const auto csv = out / "constant_scalar.simulate.trajectory0.csv";
  REQUIRE(fs::exists(csv));
  const std::string text = slurp(csv);
  CHECK(text.rfind("t,y_1,dy_1\n", 0) == 0);
  REQUIRE(fs::exists(out / "constant_scalar.simulate.trajectory1.csv"));
}

TEST_CASE("verify with an empty claim set") {
  const auto out = temp_dir("verify_empty");
  // Build a minimal scenario without a verification block.
  const Scenario s = load_scenario(kScenarios / "monotone_fails.json");
  CHECK_FALSE(s.verify.has_value());
  RunOptions opts;
  opts.out_dir = out;
  CHECK(run_scenario(kScenarios / "monotone_fails.json", "verify", opts) ==
        kExitPass);
  const auto j = nlohmann::json::parse(
      slurp(out / "monotone_fails.verify.summary.json"));
  CHECK(j["claim_count"] == 0);
  CHECK(j["all_pass"] == true);
}

TEST_CASE("reruns are byte identical") {
  const auto out1 = temp_dir("rerun1");
  const auto out2 = temp_dir("rerun2");
  RunOptions opts;
  for (const auto* cmd : {"check", "simulate", "verify"}) {
    opts.out_dir = out1;
    run_scenario(kScenarios / "constant_scalar.json", cmd, opts);
    opts.out_dir = out2;
    run_scenario(kScenarios / "constant_scalar.json", cmd, opts);
  }
  for (const auto& entry : fs::directory_iterator(out1)) {
    const auto other = out2 / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
  }
}

TEST_SUITE_END();
