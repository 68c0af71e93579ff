#include "expord/nicholson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace expord {

// ---------------------------------------------------------------------------
// Coefficient

Coefficient::Coefficient(QuasiPeriodicCoefficient qp)
    : exact_(true),
      qp_(std::move(qp)),
      lower_(qp_.lower_bound()),
      upper_(qp_.upper_bound()),
      tight_(qp_.bounds_tight()),
      freqs_(qp_.frequencies()) {}

Coefficient Coefficient::evaluable(std::function<double(double)> fn,
                                   std::optional<double> lower,
                                   std::optional<double> upper,
                                   std::vector<double> scan_freqs,
                                   bool bounds_tight) {
  Coefficient c;
  c.exact_ = false;
  c.fn_ = std::move(fn);
  c.lower_ = lower;
  c.upper_ = upper;
  c.tight_ = bounds_tight;
  c.freqs_ = std::move(scan_freqs);
  return c;
}

Coefficient Coefficient::product_with_exp(const QuasiPeriodicCoefficient& base,
                                          const QuasiPeriodicCoefficient& expo) {
  if (base.lower_bound() < 0.0) {
    throw std::invalid_argument(
        "product_with_exp: base must be certified nonnegative");
  }
  std::vector<double> freqs = base.frequencies();
  const auto ef = expo.frequencies();
  freqs.insert(freqs.end(), ef.begin(), ef.end());
  const bool tight =
      base.is_constant() && expo.bounds_tight();
  return evaluable(
      [base, expo](double t) { return base(t) * std::exp(expo(t)); },
      base.lower_bound() * std::exp(expo.lower_bound()),
      base.upper_bound() * std::exp(expo.upper_bound()), std::move(freqs),
      tight);
}

double Coefficient::operator()(double t) const {
  return exact_ ? qp_(t) : fn_(t);
}

const QuasiPeriodicCoefficient& Coefficient::quasiperiodic() const {
  if (!exact_) {
    throw std::logic_error("coefficient: no exact quasi-periodic form");
  }
  return qp_;
}

bool Coefficient::is_zero() const {
  return exact_ && qp_.is_constant() && qp_.constant_term() == 0.0;
}

// ---------------------------------------------------------------------------
// Model

void NicholsonModel::check_structure() const {
  const int m = patches();
  if (m == 0) throw std::invalid_argument("model: no patches");
  for (int i = 0; i < m; ++i) {
    if (!(delays[i] > 0.0) || !std::isfinite(delays[i])) {
      throw std::invalid_argument("model: delays must be positive");
    }
  }
  if (static_cast<int>(decay.size()) != m ||
      static_cast<int>(birth.size()) != m ||
      static_cast<int>(saturation.size()) != m ||
      static_cast<int>(migration.size()) != m) {
    throw std::invalid_argument("model: coefficient count != patch count");
  }
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(migration[i].size()) != m) {
      throw std::invalid_argument("model: migration matrix must be m x m");
    }
    if (!migration[i][i].is_zero()) {
      throw std::invalid_argument("model: migration diagonal must be zero");
    }
  }
}

NicholsonModel NicholsonModel::translated(double s) const {
  NicholsonModel out = *this;
  out.offset += s;
  return out;
}

std::vector<double> NicholsonModel::scan_freqs() const {
  std::vector<double> fs;
  auto add = [&fs](const Coefficient& c) {
    fs.insert(fs.end(), c.scan_freqs().begin(), c.scan_freqs().end());
  };
  for (const auto& c : decay) add(c);
  for (const auto& c : birth) add(c);
  for (const auto& c : saturation) add(c);
  for (const auto& row : migration) {
    for (const auto& c : row) add(c);
  }
  return fs;
}

Eigen::VectorXd rhs(const NicholsonModel& model, double t,
                    const HistorySegment& seg) {
  const int m = model.patches();
  if (seg.dim() != m) {
    throw std::invalid_argument("rhs: segment dimension mismatch");
  }
  const double tt = t + model.offset;
  Eigen::VectorXd out(m);
  for (int i = 0; i < m; ++i) {
    const double now = seg.eval(0.0, i);
    const double lag = seg.eval(-model.delays[i], i);
    double v = -model.decay[i](tt) * now;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      v += model.migration[i][j](tt) * seg.eval(0.0, j);
    }
    v += model.birth[i](tt) * lag * std::exp(-model.saturation[i](tt) * lag);
    out[i] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verdicts and inequality checks

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsStrict: return "holds-strict";
    case Verdict::HoldsNonStrict: return "holds-non-strict";
    case Verdict::Fails: return "fails";
    case Verdict::IndeterminateWithinScan: return "indeterminate-within-scan";
  }
  return "?";
}

namespace {
int severity(Verdict v) {
  switch (v) {
    case Verdict::HoldsStrict: return 0;
    case Verdict::HoldsNonStrict: return 1;
    case Verdict::IndeterminateWithinScan: return 2;
    case Verdict::Fails: return 3;
  }
  return 3;
}
}  // namespace

Verdict worst(Verdict a, Verdict b) { return severity(a) >= severity(b) ? a : b; }

namespace {

Verdict verdict_one(bool less, bool strict, double threshold, double certified,
                    double observed) {
  if (less) {
    if (certified < threshold) return Verdict::HoldsStrict;
    if (!strict && certified <= threshold) return Verdict::HoldsNonStrict;
    const bool observed_breaks =
        strict ? observed >= threshold : observed > threshold;
    if (observed_breaks) return Verdict::Fails;
    return Verdict::IndeterminateWithinScan;
  }
  if (certified > threshold) return Verdict::HoldsStrict;
  if (!strict && certified >= threshold) return Verdict::HoldsNonStrict;
  const bool observed_breaks =
      strict ? observed <= threshold : observed < threshold;
  if (observed_breaks) return Verdict::Fails;
  return Verdict::IndeterminateWithinScan;
}

}  // namespace

InequalityResult check_inequality(std::string name, bool less, bool strict,
                                  double threshold, Eigen::ArrayXd certified,
                                  Eigen::ArrayXd observed,
                                  std::optional<ScanWindow> window) {
  InequalityResult r;
  r.name = std::move(name);
  r.less = less;
  r.strict = strict;
  r.threshold = threshold;
  r.certified = std::move(certified);
  r.observed = std::move(observed);
  r.window = window;
  r.verdict = Verdict::HoldsStrict;
  r.margin = std::numeric_limits<double>::infinity();
  r.binding_patch = 0;
  for (Eigen::Index i = 0; i < r.certified.size(); ++i) {
    const Verdict v =
        verdict_one(less, strict, threshold, r.certified[i], r.observed[i]);
    r.verdict = worst(r.verdict, v);
    const double margin =
        less ? threshold - r.certified[i] : r.certified[i] - threshold;
    if (margin < r.margin) {
      r.margin = margin;
      r.binding_patch = static_cast<int>(i);
    }
  }
  return r;
}

const InequalityResult* ConditionReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

namespace {

void push_entry(ConditionReport& rep, InequalityResult e) {
  rep.overall = worst(rep.overall, e.verdict);
  rep.entries.push_back(std::move(e));
}

struct RangeEstimate {
  double certified_lower;
  double certified_upper;
  double observed_min;
  double observed_max;
  std::optional<ScanWindow> window;
};

ScanWindow pick_window(const Coefficient& c,
                       const std::optional<ScanWindow>& override_window,
                       const ScanWindow& fallback) {
  if (override_window) return *override_window;
  if (!c.scan_freqs().empty()) return default_scan_window(c.scan_freqs());
  return fallback;
}

// Certified bounds when available, exact scan extrema over the window
// otherwise; for tight coefficients no scan is run because the bounds are
// attained.
RangeEstimate estimate_range(const Coefficient& c, const ScanWindow& w,
                             double offset) {
  RangeEstimate r{};
  const double inf = std::numeric_limits<double>::infinity();
  r.certified_lower = c.lower_bound() ? *c.lower_bound() : -inf;
  r.certified_upper = c.upper_bound() ? *c.upper_bound() : inf;
  if (c.bounds_tight()) {
    r.observed_min = r.certified_lower;
    r.observed_max = r.certified_upper;
    return r;
  }
  auto f = [&c, offset](double t) { return c(t + offset); };
  r.observed_max = window_sup(f, w).value;
  r.observed_min = window_inf(f, w).value;
  r.window = w;
  return r;
}

Coefficient net_mortality_column(const NicholsonModel& model, int i) {
  // d_i - sum_j a_ji, exact when all parts are exact.
  bool exact = model.decay[i].exact();
  for (int j = 0; j < model.patches(); ++j) {
    if (j != i && !model.migration[j][i].exact()) exact = false;
  }
  if (exact) {
    QuasiPeriodicCoefficient q = model.decay[i].quasiperiodic();
    for (int j = 0; j < model.patches(); ++j) {
      if (j == i) continue;
      q = q - model.migration[j][i].quasiperiodic();
    }
    return Coefficient(q);
  }
  std::vector<double> freqs = model.decay[i].scan_freqs();
  std::optional<double> lower;
  if (model.decay[i].lower_bound()) {
    double lo = *model.decay[i].lower_bound();
    bool have = true;
    for (int j = 0; j < model.patches(); ++j) {
      if (j == i) continue;
      if (!model.migration[j][i].upper_bound()) {
        have = false;
        break;
      }
      lo -= *model.migration[j][i].upper_bound();
    }
    if (have) lower = lo;
  }
  const NicholsonModel* mp = &model;
  auto fn = [mp, i](double t) {
    double v = mp->decay[i](t);
    for (int j = 0; j < mp->patches(); ++j) {
      if (j != i) v -= mp->migration[j][i](t);
    }
    return v;
  };
  for (int j = 0; j < model.patches(); ++j) {
    if (j == i) {
      continue;
    }
    const auto& fs = model.migration[j][i].scan_freqs();
    freqs.insert(freqs.end(), fs.begin(), fs.end());
  }
  return Coefficient::evaluable(fn, lower, std::nullopt, std::move(freqs));
}

}  // namespace

ConditionReport validate_model(const NicholsonModel& model,
                               std::optional<ScanWindow> window) {
  model.check_structure();
  const int m = model.patches();
  const ScanWindow fallback =
      window ? *window : default_scan_window(model.scan_freqs());

  ConditionReport rep;
  auto per_patch_lower = [&](const char* name,
                             const std::vector<Coefficient>& cs, bool strict) {
    Eigen::ArrayXd certified(m), observed(m);
    std::optional<ScanWindow> used;
    for (int i = 0; i < m; ++i) {
      const auto r = estimate_range(cs[i], pick_window(cs[i], window, fallback),
                                    model.offset);
      certified[i] = r.certified_lower;
      observed[i] = r.observed_min;
      if (r.window) used = r.window;
    }
    push_entry(rep, check_inequality(name, /*less=*/false, strict, 0.0,
                                     std::move(certified), std::move(observed),
                                     used));
  };

  per_patch_lower("decay_lower_positive", model.decay, /*strict=*/true);

  {  // migration entries are nonnegative; reported as a single min over pairs
    Eigen::ArrayXd certified(m), observed(m);
    std::optional<ScanWindow> used;
    for (int i = 0; i < m; ++i) {
      double lo = std::numeric_limits<double>::infinity();
      double sc = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const auto& a = model.migration[i][j];
        const auto r =
            estimate_range(a, pick_window(a, window, fallback), model.offset);
        lo = std::min(lo, r.certified_lower);
        sc = std::min(sc, r.observed_min);
        if (r.window) used = r.window;
      }
      certified[i] = m == 1 ? 0.0 : lo;
      observed[i] = m == 1 ? 0.0 : sc;
    }
    push_entry(rep, check_inequality("migration_nonnegative", false,
                                     /*strict=*/false, 0.0, std::move(certified),
                                     std::move(observed), used));
  }

  per_patch_lower("birth_lower_positive", model.birth, true);
  per_patch_lower("saturation_lower_positive", model.saturation, true);

  {  // net mortality d_i - sum_j a_ji stays positive
    Eigen::ArrayXd certified(m), observed(m);
    std::optional<ScanWindow> used;
    for (int i = 0; i < m; ++i) {
      const Coefficient net = net_mortality_column(model, i);
      const auto r = estimate_range(net, pick_window(net, window, fallback),
                                    model.offset);
      certified[i] = r.certified_lower;
      observed[i] = r.observed_min;
      if (r.window) used = r.window;
    }
    push_entry(rep, check_inequality("net_mortality_positive", false, true, 0.0,
                                     std::move(certified), std::move(observed),
                                     used));
  }

  return rep;
}

// ---------------------------------------------------------------------------
// Cone construction

double cone_rate(double delay, double birth_sup) {
  return std::log(std::exp(2.0) / (delay * birth_sup)) / delay;
}

double quasimonotone_margin(double mu, double delay, double birth_sup,
                            double decay_sup) {
  return -decay_sup + mu - birth_sup / std::exp(2.0) * std::exp(mu * delay);
}

double quasimonotone_margin_slope(double mu, double delay, double birth_sup) {
  return 1.0 - birth_sup * delay / std::exp(2.0) * std::exp(mu * delay);
}

ConeSpec ConeBuild::cone() const {
  if (!ok) {
    throw std::logic_error(
        "cone_from_model: rate formula failed (r * beta_sup > e^2)");
  }
  return ConeSpec(mu);
}

ConeBuild cone_from_model(const NicholsonModel& model) {
  model.check_structure();
  const int m = model.patches();
  const ScanWindow fallback = default_scan_window(model.scan_freqs());
  ConeBuild b;
  b.mu.resize(m);
  b.margin_at_mu.resize(m);
  b.delay_birth_product.resize(m);
  b.ok = true;
  for (int i = 0; i < m; ++i) {
    const auto beta =
        estimate_range(model.birth[i],
                       pick_window(model.birth[i], std::nullopt, fallback),
                       model.offset);
    const auto d =
        estimate_range(model.decay[i],
                       pick_window(model.decay[i], std::nullopt, fallback),
                       model.offset);
    const double r = model.delays[i];
    b.delay_birth_product[i] = r * beta.certified_upper;
    b.mu[i] = cone_rate(r, beta.certified_upper);
    b.margin_at_mu[i] = quasimonotone_margin(b.mu[i], r, beta.certified_upper,
                                             d.certified_upper);
    if (b.mu[i] < 0.0) b.ok = false;
  }
  return b;
}

ConditionReport check_monotone(const NicholsonModel& model,
                               std::optional<ScanWindow> window) {
  model.check_structure();
  const int m = model.patches();
  const double e1 = std::numbers::e;
  const ScanWindow fallback =
      window ? *window : default_scan_window(model.scan_freqs());

  Eigen::ArrayXd certified(m), observed(m);
  std::optional<ScanWindow> used;
  for (int i = 0; i < m; ++i) {
    const auto beta =
        estimate_range(model.birth[i],
                       pick_window(model.birth[i], window, fallback),
                       model.offset);
    const auto d =
        estimate_range(model.decay[i],
                       pick_window(model.decay[i], window, fallback),
                       model.offset);
    const double r = model.delays[i];
    certified[i] = r * beta.certified_upper * std::exp(d.certified_upper * r);
    observed[i] = r * beta.observed_max * std::exp(d.observed_max * r);
    if (beta.window) used = beta.window;
    if (d.window) used = d.window;
  }

  ConditionReport rep;
  push_entry(rep, check_inequality("delay_pressure", true, /*strict=*/false,
                                   e1, certified, observed, used));
  push_entry(rep, check_inequality("delay_pressure_strict", true, true, e1,
                                   certified, observed, used));

  // Direct scan of the pointwise gap beta(t) <= (mu - d(t)) e^{2 - mu r}.
  const ConeBuild cone = cone_from_model(model);
  if (cone.ok) {
    Eigen::ArrayXd gap_cert(m), gap_obs(m);
    std::optional<ScanWindow> gw;
    for (int i = 0; i < m; ++i) {
      const double K = std::exp(2.0 - cone.mu[i] * model.delays[i]);
      const double mu = cone.mu[i];
      const auto& dc = model.decay[i];
      const auto& bc = model.birth[i];
      std::vector<double> freqs = dc.scan_freqs();
      freqs.insert(freqs.end(), bc.scan_freqs().begin(), bc.scan_freqs().end());
      const ScanWindow w = window ? *window
                                  : (freqs.empty() ? fallback
                                                   : default_scan_window(freqs));
      const double off = model.offset;
      auto g = [&dc, &bc, mu, K, off](double t) {
        return (mu - dc(t + off)) * K - bc(t + off);
      };
      gap_obs[i] = window_inf(g, w).value;
      const auto d =
          estimate_range(dc, pick_window(dc, window, fallback), model.offset);
      const auto beta =
          estimate_range(bc, pick_window(bc, window, fallback), model.offset);
      gap_cert[i] = (mu - d.certified_upper) * K - beta.certified_upper;
      gw = w;
    }
    push_entry(rep, check_inequality("quasimonotone_gap_scan", false, false,
                                     0.0, std::move(gap_cert),
                                     std::move(gap_obs), gw));
  } else {
    Eigen::ArrayXd bad = Eigen::ArrayXd::Constant(m, -1.0);
    push_entry(rep, check_inequality("quasimonotone_gap_scan", false, false,
                                     0.0, bad, bad, std::nullopt));
  }

  // The headline verdict is the strict delay-pressure condition.
  rep.overall = rep.entries[1].verdict;
  return rep;
}

ConditionReport check_relaxed(const NicholsonModel& model,
                              std::optional<ScanWindow> window) {
  model.check_structure();
  const int m = model.patches();
  Eigen::ArrayXd certified(m), observed(m);
  std::optional<ScanWindow> used;
  for (int i = 0; i < m; ++i) {
    if (!model.decay[i].exact() || !model.birth[i].exact()) {
      throw std::invalid_argument(
          "check_relaxed: needs exact quasi-periodic decay and birth");
    }
    const double r = model.delays[i];
    const auto& d = model.decay[i].quasiperiodic();
    const auto& beta = model.birth[i].quasiperiodic();
    const Coefficient pressure = Coefficient::product_with_exp(
        beta, d.moving_integral_coefficient(r));
    ScanWindow w = window ? *window
                          : (pressure.scan_freqs().empty()
                                 ? ScanWindow{1.0, 0.5}
                                 : default_scan_window(pressure.scan_freqs()));
    const auto est = estimate_range(pressure, w, model.offset);
    certified[i] = r * est.certified_upper;
    observed[i] = r * est.observed_max;
    if (est.window) used = est.window;
  }
  ConditionReport rep;
  push_entry(rep,
             check_inequality("averaged_delay_pressure", true, true,
                              std::numbers::e, std::move(certified),
                              std::move(observed), used));
  return rep;
}

// ---------------------------------------------------------------------------
// Mean-value change of variables

MeanTransform transform_mean(const NicholsonModel& model) {
  model.check_structure();
  const int m = model.patches();
  for (int i = 0; i < m; ++i) {
    if (!model.decay[i].exact() || !model.birth[i].exact() ||
        !model.saturation[i].exact()) {
      throw std::invalid_argument(
          "transform_mean: needs exact quasi-periodic coefficients");
    }
    for (int j = 0; j < m; ++j) {
      if (!model.migration[i][j].exact()) {
        throw std::invalid_argument(
            "transform_mean: needs exact quasi-periodic coefficients");
      }
    }
  }

  MeanTransform t;
  t.primitives.reserve(m);
  t.mean_decay.resize(m);
  t.gauge_lower.resize(m);
  t.gauge_upper.resize(m);

  std::vector<QuasiPeriodicCoefficient> h(m);
  for (int i = 0; i < m; ++i) {
    const auto& d = model.decay[i].quasiperiodic();
    h[i] = d.bounded_primitive();
    t.mean_decay[i] = d.mean_value();
    t.gauge_lower[i] = std::exp(-h[i].upper_bound());
    t.gauge_upper[i] = std::exp(-h[i].lower_bound());
  }

  NicholsonModel out;
  out.delays = model.delays;
  out.offset = model.offset;
  out.decay.reserve(m);
  out.birth.reserve(m);
  out.saturation.reserve(m);
  out.migration.assign(m, std::vector<Coefficient>(m, Coefficient(0.0)));
  for (int i = 0; i < m; ++i) {
    out.decay.emplace_back(QuasiPeriodicCoefficient(t.mean_decay[i]));
    const double r = model.delays[i];
    const QuasiPeriodicCoefficient h_lag = h[i].shifted(-r);
    out.birth.push_back(Coefficient::product_with_exp(
        model.birth[i].quasiperiodic(), h[i] - h_lag));
    out.saturation.push_back(Coefficient::product_with_exp(
        model.saturation[i].quasiperiodic(), -1.0 * h_lag));
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      out.migration[i][j] = Coefficient::product_with_exp(
          model.migration[i][j].quasiperiodic(), h[i] - h[j]);
    }
  }

  t.primitives = std::move(h);
  t.transformed = std::move(out);
  t.cone = cone_from_model(t.transformed);
  return t;
}

// ---------------------------------------------------------------------------
// Super-solution radius

RadiusResult superequilibrium_radius(const NicholsonModel& model, double cap) {
  model.check_structure();
  const int m = model.patches();
  const ScanWindow fallback = default_scan_window(model.scan_freqs());

  RadiusResult res;
  res.per_patch.resize(m);
  res.radius = 0.0;
  res.binding_patch = 0;
  for (int i = 0; i < m; ++i) {
    // Net outflow of the constant state on patch i: d_i - sum_j a_ij (row).
    double outflow_lb;
    {
      const auto d = estimate_range(
          model.decay[i], pick_window(model.decay[i], std::nullopt, fallback),
          model.offset);
      outflow_lb = d.certified_lower;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const auto& aij = model.migration[i][j];
        const auto a = estimate_range(
            aij, pick_window(aij, std::nullopt, fallback), model.offset);
        outflow_lb -= a.certified_upper;
      }
    }
    const auto beta = estimate_range(
        model.birth[i], pick_window(model.birth[i], std::nullopt, fallback),
        model.offset);
    const auto c = estimate_range(
        model.saturation[i],
        pick_window(model.saturation[i], std::nullopt, fallback),
        model.offset);
    const double beta_sup = beta.certified_upper;
    const double c_inf = c.certified_lower;
    if (!(c_inf > 0.0)) {
      throw std::runtime_error(
          "superequilibrium_radius: saturation lower bound not positive");
    }
    // g(R) = beta_sup e^{-c_inf R} - outflow_lb, decreasing; R_0 is its root.
    auto g = [&](double R) {
      return beta_sup * std::exp(-c_inf * R) - outflow_lb;
    };
    double r0;
    if (g(0.0) <= 0.0) {
      r0 = 0.0;
    } else if (g(cap) > 0.0) {
      throw std::runtime_error(
          "superequilibrium_radius: no radius below cap (net outflow bound "
          "not positive)");
    } else {
      double lo = 0.0, hi = cap;
      for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) <= 0.0 ? hi : lo) = mid;
      }
      r0 = hi;
    }
    res.per_patch[i] = r0;
    if (r0 > res.radius) {
      res.radius = r0;
      res.binding_patch = i;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Special-solution small-delay conditions (scalar equation)

ConditionReport special_solution_conditions(const NicholsonModel& model,
                                            std::optional<ScanWindow> window) {
  model.check_structure();
  if (model.patches() != 1) {
    throw std::invalid_argument(
        "special_solution_conditions: scalar models only");
  }
  if (!model.decay[0].exact() || !model.birth[0].exact()) {
    throw std::invalid_argument(
        "special_solution_conditions: needs exact quasi-periodic decay/birth");
  }
  const double r = model.delays[0];
  const double e1 = std::numbers::e;
  const auto& d = model.decay[0].quasiperiodic();
  const auto& beta = model.birth[0].quasiperiodic();
  const ScanWindow fallback =
      window ? *window : default_scan_window(model.scan_freqs());

  const auto d_est = estimate_range(
      model.decay[0], pick_window(model.decay[0], window, fallback),
      model.offset);
  const auto b_est = estimate_range(
      model.birth[0], pick_window(model.birth[0], window, fallback),
      model.offset);
  const double d0 = d.mean_value();

  // Averaged pressure sup beta(t) e^{int_{t-r}^t d - d0 r} and its raw
  // (un-centered) counterpart sup beta(t) e^{int_{t-r}^t d}.
  const QuasiPeriodicCoefficient mi = d.moving_integral_coefficient(r);
  const QuasiPeriodicCoefficient mi_centered =
      mi - QuasiPeriodicCoefficient(d0 * r);
  const Coefficient centered = Coefficient::product_with_exp(beta, mi_centered);
  const Coefficient raw = Coefficient::product_with_exp(beta, mi);
  const ScanWindow w = window ? *window
                              : (centered.scan_freqs().empty()
                                     ? ScanWindow{1.0, 0.5}
                                     : default_scan_window(centered.scan_freqs()));
  const auto centered_est = estimate_range(centered, w, model.offset);
  const auto raw_est = estimate_range(raw, w, model.offset);

  ConditionReport rep;
  auto entry1 = [&](const char* name, double cert, double obs, double thr,
                    std::optional<ScanWindow> win) {
    Eigen::ArrayXd c1(1), o1(1);
    c1[0] = cert;
    o1[0] = obs;
    push_entry(rep, check_inequality(name, true, true, thr, std::move(c1),
                                     std::move(o1), win));
  };

  // Global-Lipschitz small delay: (d^+ + beta^+) r e < 1.
  entry1("lipschitz_delay_product",
         (d_est.certified_upper + b_est.certified_upper) * r * e1,
         (d_est.observed_max + b_est.observed_max) * r * e1, 1.0,
         std::nullopt);
  // Averaged version: (d0 + sup beta e^{int d - d0 r}) r e < 1.
  entry1("lipschitz_delay_product_averaged",
         (d0 + centered_est.certified_upper) * r * e1,
         (d0 + centered_est.observed_max) * r * e1, 1.0, centered_est.window);
  // Exponential-ordering bound: r beta^+ e^{d^+ r} < 1/e.
  entry1("exponential_small_delay",
         r * b_est.certified_upper * std::exp(d_est.certified_upper * r),
         r * b_est.observed_max * std::exp(d_est.observed_max * r), 1.0 / e1,
         std::nullopt);
  // Averaged version: r sup beta e^{int d} < 1/e.
  entry1("exponential_small_delay_averaged", r * raw_est.certified_upper,
         r * raw_est.observed_max, 1.0 / e1, raw_est.window);
  return rep;
}

}  // namespace expord
