#include "expord/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace expord {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioParseError("scenario: " + where + ": " + what);
}

void reject_unknown(const json& j, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

QuasiPeriodicCoefficient parse_coefficient(const json& j,
                                           const std::string& where) {
  if (j.is_number()) {
    return QuasiPeriodicCoefficient(j.get<double>());
  }
  reject_unknown(j, where, {"const", "harmonics"});
  if (!j.contains("const")) fail(where, "missing 'const'");
  const double c0 = get_number(j["const"], where + ".const");
  std::vector<Harmonic> hs;
  if (j.contains("harmonics")) {
    if (!j["harmonics"].is_array()) fail(where, "'harmonics' must be an array");
    int k = 0;
    for (const auto& h : j["harmonics"]) {
      const std::string hw = where + ".harmonics[" + std::to_string(k++) + "]";
      reject_unknown(h, hw, {"amp", "freq", "phase"});
      if (!h.contains("amp") || !h.contains("freq")) {
        fail(hw, "needs 'amp' and 'freq'");
      }
      hs.push_back({get_number(h["amp"], hw + ".amp"),
                    get_number(h["freq"], hw + ".freq"),
                    h.contains("phase") ? get_number(h["phase"], hw + ".phase")
                                        : 0.0});
    }
  }
  try {
    return QuasiPeriodicCoefficient(c0, std::move(hs));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

json coefficient_to_json(const QuasiPeriodicCoefficient& c) {
  if (c.is_constant()) return c.constant_term();
  json hs = json::array();
  for (const auto& h : c.harmonics()) {
    hs.push_back({{"amp", h.amp}, {"freq", h.freq}, {"phase", h.phase}});
  }
  return {{"const", c.constant_term()}, {"harmonics", hs}};
}

Eigen::VectorXd parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] =
        get_number(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

std::vector<Coefficient> parse_coefficient_list(const json& j, int m,
                                                const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != m) {
    fail(where, "expected " + std::to_string(m) + " coefficient literals");
  }
  std::vector<Coefficient> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) {
    out.emplace_back(
        parse_coefficient(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

NicholsonModel parse_model(const json& j) {
  reject_unknown(j, "model",
                 {"patches", "delays", "decay", "migration", "birth",
                  "saturation", "offset"});
  for (const char* key : {"patches", "delays", "decay", "birth", "saturation"}) {
    if (!j.contains(key)) fail("model", std::string("missing '") + key + "'");
  }
  const int m = j["patches"].is_number_integer() ? j["patches"].get<int>() : -1;
  if (m < 1) fail("model.patches", "expected a positive integer");

  NicholsonModel model;
  model.delays = parse_vector(j["delays"], "model.delays").array();
  if (model.delays.size() != m) fail("model.delays", "size != patches");
  model.decay = parse_coefficient_list(j["decay"], m, "model.decay");
  model.birth = parse_coefficient_list(j["birth"], m, "model.birth");
  model.saturation =
      parse_coefficient_list(j["saturation"], m, "model.saturation");
  model.migration.assign(m, std::vector<Coefficient>(m, Coefficient(0.0)));
  if (j.contains("migration")) {
    const auto& mg = j["migration"];
    if (!mg.is_array() || static_cast<int>(mg.size()) != m) {
      fail("model.migration", "expected an m x m array");
    }
    for (int i = 0; i < m; ++i) {
      const auto row = parse_coefficient_list(
          mg[i], m, "model.migration[" + std::to_string(i) + "]");
      for (int k = 0; k < m; ++k) model.migration[i][k] = row[k];
    }
  }
  model.offset = j.contains("offset")
                     ? get_number(j["offset"], "model.offset")
                     : 0.0;
  try {
    model.check_structure();
  } catch (const std::invalid_argument& e) {
    fail("model", e.what());
  }
  return model;
}

HistoryLiteral parse_history(const json& j, int m, const std::string& where) {
  HistoryLiteral lit;
  if (j.is_number()) {
    lit.constant = Eigen::VectorXd::Constant(m, j.get<double>());
    return lit;
  }
  reject_unknown(j, where, {"constant", "components"});
  if (j.contains("constant") == j.contains("components")) {
    fail(where, "expected exactly one of 'constant' or 'components'");
  }
  if (j.contains("constant")) {
    if (j["constant"].is_number()) {
      lit.constant = Eigen::VectorXd::Constant(m, j["constant"].get<double>());
    } else {
      lit.constant = parse_vector(j["constant"], where + ".constant");
      if (lit.constant->size() != m) fail(where + ".constant", "size != patches");
    }
    return lit;
  }
  const auto& comps = j["components"];
  if (!comps.is_array() || static_cast<int>(comps.size()) != m) {
    fail(where + ".components", "expected one expression per patch");
  }
  std::vector<QuasiPeriodicCoefficient> expr;
  expr.reserve(m);
  for (int i = 0; i < m; ++i) {
    expr.push_back(parse_coefficient(
        comps[i], where + ".components[" + std::to_string(i) + "]"));
  }
  lit.expr = std::move(expr);
  return lit;
}

json history_to_json(const HistoryLiteral& lit) {
  if (lit.constant) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < lit.constant->size(); ++i) {
      arr.push_back((*lit.constant)[i]);
    }
    return {{"constant", arr}};
  }
  json comps = json::array();
  for (const auto& c : *lit.expr) comps.push_back(coefficient_to_json(c));
  return {{"components", comps}};
}

SimulationBlock parse_simulation(const json& j, int m) {
  reject_unknown(j, "simulation",
                 {"horizon", "step", "offset", "output_every", "histories"});
  SimulationBlock sim;
  if (j.contains("horizon")) sim.horizon = get_number(j["horizon"], "simulation.horizon");
  if (j.contains("step")) sim.step = get_number(j["step"], "simulation.step");
  if (j.contains("offset")) sim.offset = get_number(j["offset"], "simulation.offset");
  if (j.contains("output_every")) {
    if (!j["output_every"].is_number_integer()) {
      fail("simulation.output_every", "expected an integer");
    }
    sim.output_every = j["output_every"].get<int>();
  }
  if (j.contains("histories")) {
    if (!j["histories"].is_array()) fail("simulation.histories", "expected array");
    int k = 0;
    for (const auto& h : j["histories"]) {
      sim.histories.push_back(parse_history(
          h, m, "simulation.histories[" + std::to_string(k++) + "]"));
    }
  }
  return sim;
}

VerifyBlock parse_verify(const json& j, int m) {
  reject_unknown(j, "verification",
                 {"seed", "horizon", "step", "margin_tol", "interior_tol",
                  "monotone_pairs", "cone_entry_histories", "sublinear_lambdas",
                  "part_metric_pairs", "persistence", "subequilibrium"});
  VerifyBlock v;
  if (j.contains("seed")) v.seed = j["seed"].get<uint64_t>();
  if (j.contains("horizon")) v.horizon = get_number(j["horizon"], "verification.horizon");
  if (j.contains("step")) v.step = get_number(j["step"], "verification.step");
  if (j.contains("margin_tol")) v.margin_tol = get_number(j["margin_tol"], "verification.margin_tol");
  if (j.contains("interior_tol")) v.interior_tol = get_number(j["interior_tol"], "verification.interior_tol");
  if (j.contains("monotone_pairs")) v.monotone_pairs = j["monotone_pairs"].get<int>();
  if (j.contains("cone_entry_histories")) v.cone_entry_histories = j["cone_entry_histories"].get<int>();
  if (j.contains("sublinear_lambdas")) {
    std::vector<double> ls;
    for (const auto& l : j["sublinear_lambdas"]) {
      ls.push_back(get_number(l, "verification.sublinear_lambdas[]"));
    }
    v.sublinear_lambdas = std::move(ls);
  }
  if (j.contains("part_metric_pairs")) v.part_metric_pairs = j["part_metric_pairs"].get<int>();
  if (j.contains("persistence")) {
    const auto& p = j["persistence"];
    reject_unknown(p, "verification.persistence",
                   {"histories", "transient", "horizon", "floor_tol"});
    PersistenceBlock pb;
    if (p.contains("histories")) pb.histories = p["histories"].get<int>();
    if (p.contains("transient")) pb.transient = get_number(p["transient"], "persistence.transient");
    if (p.contains("horizon")) pb.horizon = get_number(p["horizon"], "persistence.horizon");
    if (p.contains("floor_tol")) pb.floor_tol = get_number(p["floor_tol"], "persistence.floor_tol");
    if (pb.transient <= 0.0) pb.transient = 0.6 * pb.horizon;
    v.persistence = pb;
  }
  if (j.contains("subequilibrium")) {
    const auto& s = j["subequilibrium"];
    reject_unknown(s, "verification.subequilibrium",
                   {"levels", "side", "t_scan"});
    SubequilibriumBlock sb;
    if (!s.contains("levels")) fail("verification.subequilibrium", "missing 'levels'");
    for (const auto& lvl : s["levels"]) {
      Eigen::VectorXd vec = parse_vector(lvl, "subequilibrium.levels[]");
      if (vec.size() != m) fail("subequilibrium.levels", "level size != patches");
      sb.levels.push_back(std::move(vec));
    }
    if (s.contains("side")) {
      const std::string side = s["side"].get<std::string>();
      if (side == "sub") {
        sb.side = EquilibriumSide::Sub;
      } else if (side == "super") {
        sb.side = EquilibriumSide::Super;
      } else {
        fail("subequilibrium.side", "expected 'sub' or 'super'");
      }
    }
    if (s.contains("t_scan")) sb.t_scan = get_number(s["t_scan"], "subequilibrium.t_scan");
    v.subequilibrium = sb;
  }
  return v;
}

AttractorBlock parse_attractor(const json& j) {
  reject_unknown(j, "attractor",
                 {"initials", "transient", "horizon", "seed", "spread_tol",
                  "step"});
  AttractorBlock a;
  if (j.contains("initials")) a.initials = j["initials"].get<int>();
  if (j.contains("transient")) a.transient = get_number(j["transient"], "attractor.transient");
  if (j.contains("horizon")) a.horizon = get_number(j["horizon"], "attractor.horizon");
  if (j.contains("seed")) a.seed = j["seed"].get<uint64_t>();
  if (j.contains("spread_tol")) a.spread_tol = get_number(j["spread_tol"], "attractor.spread_tol");
  if (j.contains("step")) a.step = get_number(j["step"], "attractor.step");
  return a;
}

}  // namespace

HistorySegment HistoryLiteral::materialize(const Eigen::ArrayXd& delays,
                                           double step) const {
  if (constant) {
    return HistorySegment::constant(*constant, delays, step);
  }
  std::vector<std::function<double(double)>> f, df;
  for (const auto& c : *expr) {
    f.emplace_back([c](double s) { return c(s); });
    // d/ds of a cosine sum, in closed form.
    df.emplace_back([c](double s) {
      double v = 0.0;
      for (const auto& h : c.harmonics()) {
        v -= h.amp * h.freq * std::sin(h.freq * s + h.phase);
      }
      return v;
    });
  }
  return HistorySegment::sample(f, df, delays, step);
}

Scenario scenario_from_json(const json& j, const std::string& stem) {
  reject_unknown(j, "scenario",
                 {"model", "cone", "simulation", "verification", "attractor",
                  "output"});
  if (!j.contains("model")) fail("scenario", "missing 'model'");
  Scenario s;
  s.stem = stem;
  s.model = parse_model(j["model"]);
  const int m = s.model.patches();
  if (j.contains("cone")) {
    reject_unknown(j["cone"], "cone", {"mu"});
    if (!j["cone"].contains("mu")) fail("cone", "missing 'mu'");
    Eigen::VectorXd mu = parse_vector(j["cone"]["mu"], "cone.mu");
    if (mu.size() != m) fail("cone.mu", "size != patches");
    s.cone_mu = mu.array();
  }
  if (j.contains("simulation")) s.sim = parse_simulation(j["simulation"], m);
  if (j.contains("verification")) s.verify = parse_verify(j["verification"], m);
  if (j.contains("attractor")) s.attractor = parse_attractor(j["attractor"]);
  if (j.contains("output")) {
    reject_unknown(j["output"], "output", {"dir"});
    if (j["output"].contains("dir")) {
      s.output.dir = j["output"]["dir"].get<std::string>();
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioParseError("scenario: cannot open " + path.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(std::string("scenario: ") + e.what());
  }
  return scenario_from_json(j, path.stem().string());
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json model;
  const int m = s.model.patches();
  model["patches"] = m;
  json delays = json::array();
  for (int i = 0; i < m; ++i) delays.push_back(s.model.delays[i]);
  model["delays"] = delays;
  auto coeffs = [](const std::vector<Coefficient>& cs) {
    json out = json::array();
    for (const auto& c : cs) out.push_back(coefficient_to_json(c.quasiperiodic()));
    return out;
  };
  model["decay"] = coeffs(s.model.decay);
  model["birth"] = coeffs(s.model.birth);
  model["saturation"] = coeffs(s.model.saturation);
  json mg = json::array();
  for (int i = 0; i < m; ++i) {
    json row = json::array();
    for (int k = 0; k < m; ++k) {
      row.push_back(coefficient_to_json(s.model.migration[i][k].quasiperiodic()));
    }
    mg.push_back(row);
  }
  model["migration"] = mg;
  model["offset"] = s.model.offset;

  json out;
  out["model"] = model;
  if (s.cone_mu) {
    json mu = json::array();
    for (Eigen::Index i = 0; i < s.cone_mu->size(); ++i) {
      mu.push_back((*s.cone_mu)[i]);
    }
    out["cone"] = {{"mu", mu}};
  }
  json sim;
  sim["horizon"] = s.sim.horizon;
  sim["step"] = s.sim.step;
  sim["offset"] = s.sim.offset;
  sim["output_every"] = s.sim.output_every;
  json hist = json::array();
  for (const auto& h : s.sim.histories) hist.push_back(history_to_json(h));
  sim["histories"] = hist;
  out["simulation"] = sim;
  if (s.verify) {
    json v;
    v["seed"] = s.verify->seed;
    v["horizon"] = s.verify->horizon;
    v["step"] = s.verify->step;
    v["margin_tol"] = s.verify->margin_tol;
    v["interior_tol"] = s.verify->interior_tol;
    if (s.verify->monotone_pairs) v["monotone_pairs"] = *s.verify->monotone_pairs;
    if (s.verify->cone_entry_histories) {
      v["cone_entry_histories"] = *s.verify->cone_entry_histories;
    }
    if (s.verify->sublinear_lambdas) {
      v["sublinear_lambdas"] = *s.verify->sublinear_lambdas;
    }
    if (s.verify->part_metric_pairs) {
      v["part_metric_pairs"] = *s.verify->part_metric_pairs;
    }
    if (s.verify->persistence) {
      v["persistence"] = {{"histories", s.verify->persistence->histories},
                          {"transient", s.verify->persistence->transient},
                          {"horizon", s.verify->persistence->horizon},
                          {"floor_tol", s.verify->persistence->floor_tol}};
    }
    if (s.verify->subequilibrium) {
      json levels = json::array();
      for (const auto& lvl : s.verify->subequilibrium->levels) {
        json l = json::array();
        for (Eigen::Index i = 0; i < lvl.size(); ++i) l.push_back(lvl[i]);
        levels.push_back(l);
      }
      v["subequilibrium"] = {
          {"levels", levels},
          {"side", s.verify->subequilibrium->side == EquilibriumSide::Sub
                       ? "sub"
                       : "super"},
          {"t_scan", s.verify->subequilibrium->t_scan}};
    }
    out["verification"] = v;
  }
  if (s.attractor) {
    out["attractor"] = {{"initials", s.attractor->initials},
                        {"transient", s.attractor->transient},
                        {"horizon", s.attractor->horizon},
                        {"seed", s.attractor->seed},
                        {"spread_tol", s.attractor->spread_tol},
                        {"step", s.attractor->step}};
  }
  out["output"] = {{"dir", s.output.dir}};
  return out;
}

}  // namespace expord
