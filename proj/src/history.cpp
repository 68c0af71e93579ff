#include "expord/history.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "expord/report_io.hpp"

namespace expord {

namespace {

void check_delays(const Eigen::ArrayXd& delays) {
  if (delays.size() == 0) {
    throw std::invalid_argument("history: empty component list");
  }
  for (Eigen::Index i = 0; i < delays.size(); ++i) {
    if (!(delays[i] > 0.0) || !std::isfinite(delays[i])) {
      throw std::invalid_argument("history: delays must be positive");
    }
  }
}

int expected_points(double delay, double step) {
  const double ratio = delay / step;
  const auto n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument(
        "history: step does not divide the delay into whole intervals");
  }
  return n + 1;
}

Eigen::ArrayXd finite_differences(const Eigen::ArrayXd& v, double h) {
  const Eigen::Index n = v.size();
  Eigen::ArrayXd d(n);
  if (n == 2) {
    d[0] = d[1] = (v[1] - v[0]) / h;
    return d;
  }
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    d[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
  }
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

}  // namespace

HistorySegment HistorySegment::make(std::vector<Eigen::ArrayXd> values,
                                    const Eigen::ArrayXd& delays, double step,
                                    DerivFill fill) {
  check_delays(delays);
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("history: step must be positive");
  }
  if (static_cast<Eigen::Index>(values.size()) != delays.size()) {
    throw std::invalid_argument("history: values/delays size mismatch");
  }
  HistorySegment seg;
  seg.delays_ = delays;
  seg.values_ = std::move(values);
  for (int i = 0; i < seg.dim(); ++i) {
    const int n = expected_points(delays[i], step);
    if (seg.values_[i].size() != n) {
      throw std::invalid_argument(
          "history: component sample count inconsistent with delay/step");
    }
  }
  if (fill == DerivFill::FiniteDifference) {
    seg.derivs_.reserve(seg.values_.size());
    for (int i = 0; i < seg.dim(); ++i) {
      seg.derivs_.push_back(
          finite_differences(seg.values_[i], seg.grid_step(i)));
    }
    seg.has_derivs_ = true;
  }
  return seg;
}

HistorySegment HistorySegment::make_with_derivs(
    std::vector<Eigen::ArrayXd> values, std::vector<Eigen::ArrayXd> derivs,
    const Eigen::ArrayXd& delays) {
  check_delays(delays);
  if (static_cast<Eigen::Index>(values.size()) != delays.size() ||
      values.size() != derivs.size()) {
    throw std::invalid_argument("history: values/derivs/delays size mismatch");
  }
  HistorySegment seg;
  seg.delays_ = delays;
  seg.values_ = std::move(values);
  seg.derivs_ = std::move(derivs);
  seg.has_derivs_ = true;
  for (int i = 0; i < seg.dim(); ++i) {
    if (seg.values_[i].size() < 2) {
      throw std::invalid_argument("history: need at least 2 samples");
    }
    if (seg.values_[i].size() != seg.derivs_[i].size()) {
      throw std::invalid_argument("history: derivs shape differs from values");
    }
  }
  return seg;
}

HistorySegment HistorySegment::make_values_only(
    std::vector<Eigen::ArrayXd> values, const Eigen::ArrayXd& delays) {
  check_delays(delays);
  if (static_cast<Eigen::Index>(values.size()) != delays.size()) {
    throw std::invalid_argument("history: values/delays size mismatch");
  }
  HistorySegment seg;
  seg.delays_ = delays;
  seg.values_ = std::move(values);
  seg.has_derivs_ = false;
  for (int i = 0; i < seg.dim(); ++i) {
    if (seg.values_[i].size() < 2) {
      throw std::invalid_argument("history: need at least 2 samples");
    }
  }
  return seg;
}

HistorySegment HistorySegment::sample(
    const std::vector<std::function<double(double)>>& f,
    const Eigen::ArrayXd& delays, double step) {
  check_delays(delays);
  if (static_cast<Eigen::Index>(f.size()) != delays.size()) {
    throw std::invalid_argument("history: sampler count mismatch");
  }
  std::vector<Eigen::ArrayXd> values(f.size());
  for (Eigen::Index i = 0; i < delays.size(); ++i) {
    const int n = std::max(2, static_cast<int>(std::lround(delays[i] / step)) + 1);
    values[i].resize(n);
    for (int k = 0; k < n; ++k) {
      const double s = -delays[i] * (double(n - 1 - k) / double(n - 1));
      values[i][k] = f[i](s);
    }
  }
  // Infer per-component spacing; bypass make()'s divisibility check.
  std::vector<Eigen::ArrayXd> derivs(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    derivs[i] = finite_differences(values[i],
                                   delays[i] / double(values[i].size() - 1));
  }
  return make_with_derivs(std::move(values), std::move(derivs), delays);
}

HistorySegment HistorySegment::sample(
    const std::vector<std::function<double(double)>>& f,
    const std::vector<std::function<double(double)>>& df,
    const Eigen::ArrayXd& delays, double step) {
  check_delays(delays);
  if (static_cast<Eigen::Index>(f.size()) != delays.size() ||
      f.size() != df.size()) {
    throw std::invalid_argument("history: sampler count mismatch");
  }
  std::vector<Eigen::ArrayXd> values(f.size()), derivs(f.size());
  for (Eigen::Index i = 0; i < delays.size(); ++i) {
    const int n = std::max(2, static_cast<int>(std::lround(delays[i] / step)) + 1);
    values[i].resize(n);
    derivs[i].resize(n);
    for (int k = 0; k < n; ++k) {
      const double s = -delays[i] * (double(n - 1 - k) / double(n - 1));
      values[i][k] = f[i](s);
      derivs[i][k] = df[i](s);
    }
  }
  return make_with_derivs(std::move(values), std::move(derivs), delays);
}

HistorySegment HistorySegment::constant(const Eigen::VectorXd& v,
                                        const Eigen::ArrayXd& delays,
                                        double step) {
  check_delays(delays);
  if (v.size() != delays.size()) {
    throw std::invalid_argument("history: constant state size mismatch");
  }
  std::vector<Eigen::ArrayXd> values(v.size()), derivs(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const int n = std::max(2, static_cast<int>(std::lround(delays[i] / step)) + 1);
    values[i] = Eigen::ArrayXd::Constant(n, v[i]);
    derivs[i] = Eigen::ArrayXd::Zero(n);
  }
  return make_with_derivs(std::move(values), std::move(derivs), delays);
}

double HistorySegment::grid_step(int comp) const {
  return delays_[comp] / double(points(comp) - 1);
}

double HistorySegment::grid_point(int comp, int k) const {
  const int n = points(comp);
  return -delays_[comp] * (double(n - 1 - k) / double(n - 1));
}

const Eigen::ArrayXd& HistorySegment::derivs(int comp) const {
  if (!has_derivs_) {
    throw std::logic_error("history: derivatives not stored");
  }
  return derivs_[comp];
}

namespace {

// Locate: index k in [0, n-2] and local coordinate theta in [0,1]; queries
// within 1e-9 steps of a node snap onto it so node values reproduce exactly.
struct GridPos {
  int k;
  double theta;
};

GridPos locate(double s, double delay, int n, int comp) {
  const double h = delay / double(n - 1);
  const double u = (s + delay) / h;
  if (u < -1e-9 || u > double(n - 1) + 1e-9) {
    throw std::out_of_range("history: eval point outside [-r_" +
                            std::to_string(comp) + ", 0]");
  }
  const auto nearest = static_cast<int>(std::lround(u));
  if (std::abs(u - nearest) < 1e-9) {
    if (nearest >= n - 1) return {n - 2, 1.0};
    return {nearest, 0.0};
  }
  int k = static_cast<int>(std::floor(u));
  k = std::max(0, std::min(k, n - 2));
  return {k, u - k};
}

}  // namespace

double HistorySegment::eval(double s, int comp) const {
  const auto& v = values_[comp];
  const int n = points(comp);
  const auto [k, th] = locate(s, delays_[comp], n, comp);
  if (th == 0.0) return v[k];
  if (th == 1.0) return v[k + 1];
  if (!has_derivs_) {
    return v[k] * (1.0 - th) + v[k + 1] * th;
  }
  const double h = grid_step(comp);
  const auto& d = derivs_[comp];
  const double t2 = th * th, t3 = t2 * th;
  return v[k] * (2 * t3 - 3 * t2 + 1) + h * d[k] * (t3 - 2 * t2 + th) +
         v[k + 1] * (-2 * t3 + 3 * t2) + h * d[k + 1] * (t3 - t2);
}

double HistorySegment::eval_deriv(double s, int comp) const {
  if (!has_derivs_) {
    throw std::logic_error("history: derivatives not stored");
  }
  const auto& v = values_[comp];
  const auto& d = derivs_[comp];
  const int n = points(comp);
  const auto [k, th] = locate(s, delays_[comp], n, comp);
  if (th == 0.0) return d[k];
  if (th == 1.0) return d[k + 1];
  const double h = grid_step(comp);
  const double t2 = th * th;
  return (v[k] * (6 * t2 - 6 * th) + h * d[k] * (3 * t2 - 4 * th + 1) +
          v[k + 1] * (-6 * t2 + 6 * th) + h * d[k + 1] * (3 * t2 - 2 * th)) /
         h;
}

Eigen::VectorXd HistorySegment::at_zero() const {
  Eigen::VectorXd out(dim());
  for (int i = 0; i < dim(); ++i) out[i] = values_[i][points(i) - 1];
  return out;
}

Eigen::VectorXd HistorySegment::at_delay() const {
  Eigen::VectorXd out(dim());
  for (int i = 0; i < dim(); ++i) out[i] = values_[i][0];
  return out;
}

double HistorySegment::norm(NormKind kind) const {
  double sup = 0.0;
  for (const auto& v : values_) sup = std::max(sup, v.abs().maxCoeff());
  if (kind == NormKind::Sup) return sup;
  if (!has_derivs_) {
    throw std::logic_error("history: Lipschitz norm needs derivatives");
  }
  double slope = 0.0;
  for (const auto& d : derivs_) slope = std::max(slope, d.abs().maxCoeff());
  return sup + slope;
}

bool same_grid(const HistorySegment& a, const HistorySegment& b) {
  if (a.dim() != b.dim()) return false;
  for (int i = 0; i < a.dim(); ++i) {
    if (a.points(i) != b.points(i)) return false;
    if (std::abs(a.delay(i) - b.delay(i)) >
        1e-12 * std::max(1.0, std::abs(a.delay(i)))) {
      return false;
    }
  }
  return true;
}

HistorySegment axpy(double alpha, const HistorySegment& x,
                    const HistorySegment& y) {
  if (!same_grid(x, y)) {
    throw std::invalid_argument("axpy: grid mismatch");
  }
  std::vector<Eigen::ArrayXd> values(x.dim()), derivs;
  for (int i = 0; i < x.dim(); ++i) {
    values[i] = alpha * x.values(i) + y.values(i);
  }
  if (x.has_derivs() && y.has_derivs()) {
    derivs.resize(x.dim());
    for (int i = 0; i < x.dim(); ++i) {
      derivs[i] = alpha * x.derivs(i) + y.derivs(i);
    }
    return HistorySegment::make_with_derivs(std::move(values),
                                            std::move(derivs), x.delays());
  }
  // A value-only operand degrades the result to value-only.
  return HistorySegment::make_values_only(std::move(values), x.delays());
}

HistorySegment scale(double alpha, const HistorySegment& x) {
  std::vector<Eigen::ArrayXd> values(x.dim());
  for (int i = 0; i < x.dim(); ++i) values[i] = alpha * x.values(i);
  if (!x.has_derivs()) {
    return HistorySegment::make_values_only(std::move(values), x.delays());
  }
  std::vector<Eigen::ArrayXd> derivs(x.dim());
  for (int i = 0; i < x.dim(); ++i) derivs[i] = alpha * x.derivs(i);
  return HistorySegment::make_with_derivs(std::move(values), std::move(derivs),
                                          x.delays());
}

void write_csv(const HistorySegment& seg, std::ostream& os) {
  os << "component,s,value,deriv\n";
  for (int i = 0; i < seg.dim(); ++i) {
    for (int k = 0; k < seg.points(i); ++k) {
      os << i << ',' << format_double(seg.grid_point(i, k)) << ','
         << format_double(seg.values(i)[k]) << ','
         << (seg.has_derivs() ? format_double(seg.derivs(i)[k]) : std::string())
         << '\n';
    }
  }
}

}  // namespace expord
