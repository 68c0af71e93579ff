#include "expord/quasiperiodic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>

namespace expord {

namespace {

void check_harmonics(const std::vector<Harmonic>& hs) {
  for (const auto& h : hs) {
    if (!(h.freq > 0.0) || !std::isfinite(h.freq) || !std::isfinite(h.amp) ||
        !std::isfinite(h.phase)) {
      throw std::invalid_argument(
          "coefficient: harmonics need finite amp/phase and freq > 0");
    }
  }
}

// Group by frequency and add amplitudes as phasors; colliding terms merge
// exactly, including full cancellation.
std::vector<Harmonic> merge(std::vector<Harmonic> hs) {
  std::map<double, std::vector<Harmonic>> by_freq;
  for (const auto& h : hs) by_freq[h.freq].push_back(h);
  std::vector<Harmonic> out;
  out.reserve(by_freq.size());
  for (auto& [freq, group] : by_freq) {
    if (group.size() == 1) {
      if (group[0].amp != 0.0) out.push_back(group[0]);
      continue;
    }
    std::complex<double> z{0.0, 0.0};
    for (const auto& h : group) {
      // amp may be negative, so build the phasor explicitly.
      z += std::complex<double>(h.amp * std::cos(h.phase),
                                h.amp * std::sin(h.phase));
    }
    const double amp = std::abs(z);
    if (amp != 0.0) {
      out.push_back({amp, freq, std::arg(z)});
    }
  }
  return out;
}

}  // namespace

QuasiPeriodicCoefficient::QuasiPeriodicCoefficient(double constant,
                                                   std::vector<Harmonic> harmonics)
    : constant_(constant), harmonics_(std::move(harmonics)) {
  if (!std::isfinite(constant_)) {
    throw std::invalid_argument("coefficient: constant must be finite");
  }
  check_harmonics(harmonics_);
  harmonics_ = merge(std::move(harmonics_));
  cache_bounds();
}

void QuasiPeriodicCoefficient::cache_bounds() {
  double span = 0.0;
  for (const auto& h : harmonics_) span += std::abs(h.amp);
  lower_ = constant_ - span;
  upper_ = constant_ + span;
}

double QuasiPeriodicCoefficient::operator()(double t) const {
  double v = constant_;
  for (const auto& h : harmonics_) {
    v += h.amp * std::cos(h.freq * t + h.phase);
  }
  return v;
}

double QuasiPeriodicCoefficient::moving_integral(double t,
                                                 double window) const {
  if (!(window > 0.0)) {
    throw std::invalid_argument("moving_integral: window must be positive");
  }
  double v = constant_ * window;
  for (const auto& h : harmonics_) {
    v += (h.amp / h.freq) * (std::sin(h.freq * t + h.phase) -
                             std::sin(h.freq * (t - window) + h.phase));
  }
  return v;
}

QuasiPeriodicCoefficient QuasiPeriodicCoefficient::moving_integral_coefficient(
    double window) const {
  if (!(window > 0.0)) {
    throw std::invalid_argument("moving_integral: window must be positive");
  }
  std::vector<Harmonic> hs;
  hs.reserve(harmonics_.size());
  for (const auto& h : harmonics_) {
    // sin(wt+p) - sin(w(t-r)+p) = 2 sin(wr/2) cos(wt + p - wr/2)
    hs.push_back({2.0 * h.amp * std::sin(h.freq * window / 2.0) / h.freq,
                  h.freq, h.phase - h.freq * window / 2.0});
  }
  return QuasiPeriodicCoefficient(constant_ * window, std::move(hs));
}

QuasiPeriodicCoefficient QuasiPeriodicCoefficient::bounded_primitive() const {
  std::vector<Harmonic> hs;
  hs.reserve(harmonics_.size());
  for (const auto& h : harmonics_) {
    // (a/w) sin(wt+p) = (a/w) cos(wt + p - pi/2)
    hs.push_back({h.amp / h.freq, h.freq, h.phase - std::numbers::pi / 2.0});
  }
  return QuasiPeriodicCoefficient(0.0, std::move(hs));
}

QuasiPeriodicCoefficient QuasiPeriodicCoefficient::shifted(double delta) const {
  std::vector<Harmonic> hs = harmonics_;
  for (auto& h : hs) h.phase += h.freq * delta;
  return QuasiPeriodicCoefficient(constant_, std::move(hs));
}

std::vector<double> QuasiPeriodicCoefficient::frequencies() const {
  std::vector<double> fs;
  fs.reserve(harmonics_.size());
  for (const auto& h : harmonics_) fs.push_back(h.freq);
  return fs;
}

QuasiPeriodicCoefficient operator+(const QuasiPeriodicCoefficient& a,
                                   const QuasiPeriodicCoefficient& b) {
  std::vector<Harmonic> hs = a.harmonics_;
  hs.insert(hs.end(), b.harmonics_.begin(), b.harmonics_.end());
  return QuasiPeriodicCoefficient(a.constant_ + b.constant_, std::move(hs));
}

QuasiPeriodicCoefficient operator-(const QuasiPeriodicCoefficient& a,
                                   const QuasiPeriodicCoefficient& b) {
  return a + (-1.0 * b);
}

QuasiPeriodicCoefficient operator*(double a,
                                   const QuasiPeriodicCoefficient& c) {
  std::vector<Harmonic> hs = c.harmonics_;
  for (auto& h : hs) h.amp *= a;
  return QuasiPeriodicCoefficient(a * c.constant_, std::move(hs));
}

namespace {

// Golden-section refinement for a maximum; tracks the best point evaluated.
std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double lo, double hi) {
  constexpr double invgr = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - invgr * (b - a);
  double d = a + invgr * (b - a);
  double fc = f(c), fd = f(d);
  double best_x = fc >= fd ? c : d;
  double best = std::max(fc, fd);
  for (int it = 0; it < 80 && b - a > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invgr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invgr * (b - a);
      fd = f(d);
    }
    if (fc > best) best = fc, best_x = c;
    if (fd > best) best = fd, best_x = d;
  }
  return {best, best_x};
}

}  // namespace

WindowSup window_sup(const std::function<double(double)>& f,
                     const ScanWindow& w) {
  if (!(w.t_scan > 0.0) || !(w.step > 0.0)) {
    throw std::invalid_argument("window_sup: t_scan and step must be positive");
  }
  const auto n = static_cast<long>(std::floor(w.t_scan / w.step));
  double best = f(0.0);
  double best_t = 0.0;
  for (long k = 1; k <= n; ++k) {
    const double t = k * w.step;
    const double v = f(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  const double lo = std::max(0.0, best_t - w.step);
  const double hi = std::min(w.t_scan, best_t + w.step);
  const auto [rv, rt] = golden_max(f, lo, hi);
  if (rv > best) {
    best = rv;
    best_t = rt;
  }
  return {best, best_t, w};
}

WindowSup window_inf(const std::function<double(double)>& f,
                     const ScanWindow& w) {
  auto neg = window_sup([&f](double t) { return -f(t); }, w);
  return {-neg.value, neg.argmax, w};
}

ScanWindow default_scan_window(const std::vector<double>& freqs) {
  if (freqs.empty()) return {1.0, 0.5};
  const double wmin = *std::min_element(freqs.begin(), freqs.end());
  const double wmax = *std::max_element(freqs.begin(), freqs.end());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double t_scan = std::min(50.0 * two_pi / wmin, 1e4);
  const double step = (two_pi / wmax) / 50.0;
  return {t_scan, step};
}

}  // namespace expord
