#include "expord/report_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace expord {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

nlohmann::json json_number(double v) {
  // JSON has no infinities; clamp bound-less entries to string markers.
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

nlohmann::json to_json(const Eigen::ArrayXd& a) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(json_number(a[i]));
  return out;
}

nlohmann::json to_json(const std::optional<ScanWindow>& w) {
  if (!w) return nullptr;
  return {{"t_scan", w->t_scan}, {"step", w->step}};
}

}  // namespace

nlohmann::json to_json(const OrderReport& r) {
  return {{"holds", r.holds},
          {"margin", json_number(r.margin)},
          {"tol", r.tol},
          {"component", r.where.component},
          {"s", r.where.s}};
}

nlohmann::json to_json(const InequalityResult& r) {
  return {{"name", r.name},
          {"relation", std::string(r.less ? "<" : ">") + (r.strict ? "" : "=")},
          {"threshold", r.threshold},
          {"certified", to_json(r.certified)},
          {"observed", to_json(r.observed)},
          {"verdict", to_string(r.verdict)},
          {"margin", json_number(r.margin)},
          {"binding_patch", r.binding_patch},
          {"scan_window", to_json(r.window)}};
}

nlohmann::json to_json(const ConditionReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) entries.push_back(to_json(e));
  return {{"entries", entries}, {"overall", to_string(r.overall)}};
}

nlohmann::json to_json(const ConeBuild& c) {
  return {{"ok", c.ok},
          {"mu", to_json(c.mu)},
          {"quasimonotone_margin_at_mu", to_json(c.margin_at_mu)},
          {"delay_birth_product", to_json(c.delay_birth_product)}};
}

nlohmann::json to_json(const MeanTransform& t) {
  nlohmann::json prims = nlohmann::json::array();
  for (const auto& h : t.primitives) {
    nlohmann::json harmonics = nlohmann::json::array();
    for (const auto& hh : h.harmonics()) {
      harmonics.push_back(
          {{"amp", hh.amp}, {"freq", hh.freq}, {"phase", hh.phase}});
    }
    prims.push_back({{"const", h.constant_term()}, {"harmonics", harmonics}});
  }
  return {{"mean_decay", to_json(t.mean_decay)},
          {"primitive", prims},
          {"gauge_lower", to_json(t.gauge_lower)},
          {"gauge_upper", to_json(t.gauge_upper)},
          {"cone", to_json(t.cone)}};
}

nlohmann::json to_json(const RadiusResult& r) {
  return {{"radius", r.radius},
          {"binding_patch", r.binding_patch},
          {"per_patch", to_json(r.per_patch)}};
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.samples) {
    nlohmann::json e = {{"index", s.index},
                        {"pass", s.pass},
                        {"margin", json_number(s.margin)},
                        {"time", s.time}};
    if (!s.note.empty()) e["note"] = s.note;
    samples.push_back(e);
  }
  nlohmann::json params;
  for (const auto& [k, v] : r.params) params[k] = json_number(v);
  return {{"claim", r.claim},
          {"seed", r.seed},
          {"horizon", r.horizon},
          {"step", r.step},
          {"params", params},
          {"samples", samples},
          {"worst_margin", json_number(r.worst_margin)},
          {"passes", r.passes},
          {"failures", r.failures},
          {"exploratory", r.exploratory},
          {"all_pass", r.all_pass()}};
}

nlohmann::json to_json(const AttractorEstimate& a) {
  return {{"report", to_json(a.report)},
          {"tail_spread", json_number(a.tail_spread)},
          {"floor", json_number(a.floor)},
          {"copy_of_base", a.copy_of_base},
          {"spread_tol", a.spread_tol},
          {"times", a.times.size()}};
}

void write_csv(const PartMetricTrace& trace, std::ostream& os) {
  os << "t,part_metric\n";
  for (size_t i = 0; i < trace.times.size(); ++i) {
    os << format_double(trace.times[i]) << ','
       << format_double(trace.values[i]) << '\n';
  }
}

void write_csv(const AttractorEstimate& a, std::ostream& os) {
  const int m = static_cast<int>(a.base_orbit.cols());
  os << 't';
  for (int i = 1; i <= m; ++i) os << ",b_" << i;
  os << ",spread\n";
  for (Eigen::Index k = 0; k < a.times.size(); ++k) {
    os << format_double(a.times[k]);
    for (int i = 0; i < m; ++i) os << ',' << format_double(a.base_orbit(k, i));
    os << ',' << format_double(a.spread[k]) << '\n';
  }
}

}  // namespace expord
