#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "expord/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exponential-ordering toolkit for delay Nicholson systems"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string policy = "strict";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario, "scenario file (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "master seed override")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    cmd->add_option("--policy", policy, "condition gate: strict | relaxed")
        ->check(CLI::IsMember({"strict", "relaxed"}));
  };

  add_common(app.add_subcommand(
      "check", "evaluate hypotheses, monotonicity conditions and radii"));
  add_common(app.add_subcommand("simulate", "integrate the scenario histories"));
  add_common(app.add_subcommand("verify", "run the verification claims"));
  add_common(
      app.add_subcommand("attractor", "estimate the attracting orbit"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : expord::kExitUsage;
  }

  expord::RunOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (seed_set) opts.seed = seed;
  opts.policy =
      policy == "relaxed" ? expord::Policy::Relaxed : expord::Policy::Strict;
  opts.log = &std::cerr;

  const std::string command = app.get_subcommands().front()->get_name();
  return expord::run_scenario(scenario, command, opts);
}
