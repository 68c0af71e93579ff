#include "expord/run.hpp"

#include <fstream>
#include <iostream>

#include "expord/report_io.hpp"
#include "expord/scenario.hpp"

namespace expord {

namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

int severity_exit(Verdict v) {
  switch (v) {
    case Verdict::HoldsStrict:
    case Verdict::HoldsNonStrict:
      return kExitPass;
    case Verdict::IndeterminateWithinScan:
      return kExitIndeterminate;
    case Verdict::Fails:
      return kExitFail;
  }
  return kExitFail;
}

ConeSpec scenario_cone(const Scenario& s, const ConeBuild& built) {
  if (s.cone_mu) return ConeSpec(*s.cone_mu);
  return built.cone();
}

int run_check(const Scenario& s, const std::filesystem::path& dir,
              Policy policy) {
  json out;
  out["scenario"] = s.stem;
  out["policy"] = policy == Policy::Strict ? "strict" : "relaxed";

  const ConditionReport validation = validate_model(s.model);
  out["validate"] = to_json(validation);

  const ConeBuild cone = cone_from_model(s.model);
  out["cone"] = to_json(cone);

  const ConditionReport monotone = check_monotone(s.model);
  out["monotone"] = to_json(monotone);

  const ConditionReport relaxed = check_relaxed(s.model);
  out["relaxed"] = to_json(relaxed);

  const MeanTransform transform = transform_mean(s.model);
  json tj = to_json(transform);
  const ConditionReport transformed_monotone = check_monotone(transform.transformed);
  tj["monotone"] = to_json(transformed_monotone);
  const ConditionReport transformed_validation =
      validate_model(transform.transformed);
  tj["validate"] = to_json(transformed_validation);
  out["transform"] = tj;

  try {
    out["superequilibrium_radius"] = to_json(superequilibrium_radius(s.model));
  } catch (const std::exception& e) {
    out["superequilibrium_radius"] = {{"error", e.what()}};
  }

  if (s.model.patches() == 1) {
    out["special_solutions"] = to_json(special_solution_conditions(s.model));
  }

  // Exit gate: the monotonicity route selected by the policy. Under the
  // relaxed policy the averaged condition together with the transformed
  // model's hypotheses stands in for the plain ones, and the better of the
  // two routes decides.
  Verdict gate;
  if (policy == Policy::Strict) {
    gate = worst(validation.overall, monotone.overall);
  } else {
    const Verdict strict_route = worst(validation.overall, monotone.overall);
    const Verdict relaxed_route =
        worst(transformed_validation.overall, relaxed.overall);
    gate = worst(strict_route, relaxed_route) == strict_route ? relaxed_route
                                                              : strict_route;
  }
  out["gate"] = {{"verdict", to_string(gate)},
                 {"exit", severity_exit(gate)}};
  write_json(dir / (s.stem + ".check.conditions.json"), out);
  return severity_exit(gate);
}

int run_simulate(const Scenario& s, const std::filesystem::path& dir) {
  const NicholsonModel model = s.model.translated(s.sim.offset);
  const double step = s.sim.step > 0.0 ? s.sim.step : default_step(model);
  int k = 0;
  for (const auto& lit : s.sim.histories) {
    const HistorySegment history =
        lit.materialize(model.delays, default_step(model));
    const Trajectory traj = integrate(model, history, s.sim.horizon, step);
    std::ofstream os(dir / (s.stem + ".simulate.trajectory" +
                            std::to_string(k++) + ".csv"),
                     std::ios::binary);
    write_csv(traj, os, s.sim.output_every);
  }
  return kExitPass;
}

int run_verify(const Scenario& s, const std::filesystem::path& dir,
               std::optional<uint64_t> seed_override) {
  json summary;
  summary["scenario"] = s.stem;
  int claims = 0;
  bool all_pass = true;

  if (s.verify) {
    const VerifyBlock& v = *s.verify;
    const uint64_t seed = seed_override.value_or(v.seed);
    HarnessOptions opts;
    opts.step = v.step;
    opts.margin_tol = v.margin_tol;
    opts.interior_tol = v.interior_tol;

    const ConeBuild built = cone_from_model(s.model);
    const ConeSpec cone = scenario_cone(s, built);

    auto emit = [&](const VerificationReport& rep, const std::string& claim) {
      write_json(dir / (s.stem + ".verify." + claim + ".json"), to_json(rep));
      summary["claims"].push_back(claim);
      ++claims;
      all_pass = all_pass && rep.all_pass();
    };

    if (v.monotone_pairs) {
      emit(verify_monotone(s.model, cone, *v.monotone_pairs, v.horizon, seed,
                           opts),
           "monotone");
    }
    if (v.cone_entry_histories) {
      emit(verify_cone_entry(s.model, cone, *v.cone_entry_histories, seed,
                             opts),
           "cone_entry");
    }
    if (v.sublinear_lambdas) {
      std::mt19937_64 rng(derive_seed(seed, 0x5ab));
      const HistorySegment psi =
          random_interior_segment(s.model.delays, cone, rng);
      emit(verify_sublinear(s.model, cone, psi, *v.sublinear_lambdas,
                            v.horizon, opts),
           "sublinear");
    }
    if (v.part_metric_pairs) {
      VerificationReport combined;
      combined.claim = "part_metric";
      combined.seed = seed;
      combined.horizon = v.horizon;
      combined.step = opts.step;
      std::vector<PartMetricTrace> traces;
      for (int p = 0; p < *v.part_metric_pairs; ++p) {
        std::mt19937_64 rng(derive_seed(seed, 0x911 + p));
        const HistorySegment phi =
            random_interior_segment(s.model.delays, cone, rng);
        const HistorySegment psi =
            random_interior_segment(s.model.delays, cone, rng);
        PartMetricTrace tr =
            part_metric_trace(s.model, cone, phi, psi, v.horizon, opts);
        for (auto& sample : tr.report.samples) {
          sample.index = p;
          combined.push(sample);
        }
        traces.push_back(std::move(tr));
      }
      emit(combined, "part_metric");
      std::ofstream os(dir / (s.stem + ".verify.part_metric.csv"),
                       std::ios::binary);
      os << "pair,t,part_metric\n";
      for (size_t p = 0; p < traces.size(); ++p) {
        for (size_t i = 0; i < traces[p].times.size(); ++i) {
          os << p << ',' << format_double(traces[p].times[i]) << ','
             << format_double(traces[p].values[i]) << '\n';
        }
      }
    }
    if (v.persistence) {
      const auto& pb = *v.persistence;
      const PersistenceResult pr = persistence_floor(
          s.model, pb.histories, pb.transient, pb.horizon, seed, pb.floor_tol,
          opts);
      json pj = to_json(pr.report);
      pj["floor"] = pr.floor;
      pj["persistent"] = pr.persistent;
      write_json(dir / (s.stem + ".verify.persistence.json"), pj);
      summary["claims"].push_back("persistence");
      ++claims;
      all_pass = all_pass && pr.persistent;
    }
    if (v.subequilibrium) {
      const auto& sb = *v.subequilibrium;
      std::optional<ScanWindow> window;
      if (sb.t_scan > 0.0) {
        const ScanWindow d = default_scan_window(s.model.scan_freqs());
        window = ScanWindow{sb.t_scan, d.step};
      }
      VerificationReport combined;
      combined.claim =
          sb.side == EquilibriumSide::Sub ? "subequilibrium" : "superequilibrium";
      for (size_t i = 0; i < sb.levels.size(); ++i) {
        VerificationReport one =
            check_subequilibrium(s.model, sb.levels[i], sb.side, window);
        for (auto& sample : one.samples) {
          sample.index = static_cast<int>(i);
          combined.push(sample);
        }
        combined.params = one.params;
      }
      emit(combined, "subequilibrium");
    }
  }

  summary["claim_count"] = claims;
  summary["all_pass"] = all_pass;
  if (claims == 0) summary["claims"] = json::array();
  write_json(dir / (s.stem + ".verify.summary.json"), summary);
  return all_pass ? kExitPass : kExitFail;
}

int run_attractor(const Scenario& s, const std::filesystem::path& dir,
                  std::optional<uint64_t> seed_override) {
  const AttractorBlock a = s.attractor.value_or(AttractorBlock{});
  HarnessOptions opts;
  opts.step = a.step;
  const AttractorEstimate est = attractor_estimate(
      s.model, a.initials, a.transient, a.horizon,
      seed_override.value_or(a.seed), a.spread_tol, opts);
  write_json(dir / (s.stem + ".attractor.estimate.json"), to_json(est));
  std::ofstream os(dir / (s.stem + ".attractor.estimate.csv"),
                   std::ios::binary);
  write_csv(est, os);
  return est.copy_of_base ? kExitPass : kExitFail;
}

}  // namespace

int run_scenario(const std::filesystem::path& scenario_path,
                 const std::string& command, const RunOptions& opts) {
  Scenario s;
  try {
    s = load_scenario(scenario_path);
  } catch (const ScenarioParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }
  if (command != "check" && command != "simulate" && command != "verify" &&
      command != "attractor") {
    std::cerr << "expord: unknown command '" << command << "'\n";
    return kExitUsage;
  }

  const std::filesystem::path dir = opts.out_dir.value_or(
      scenario_path.parent_path() / s.output.dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "expord: cannot create output directory " << dir << '\n';
    return kExitUsage;
  }

  try {
    if (command == "check") return run_check(s, dir, opts.policy);
    if (command == "simulate") return run_simulate(s, dir);
    if (command == "verify") return run_verify(s, dir, opts.seed);
    return run_attractor(s, dir, opts.seed);
  } catch (const std::exception& e) {
    std::cerr << "expord: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace expord
