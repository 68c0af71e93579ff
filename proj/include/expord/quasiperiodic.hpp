#pragma once

#include <functional>
#include <vector>

namespace expord {

struct Harmonic {
  double amp;
  double freq;   // strictly positive
  double phase;
};

/// Finite cosine sum c0 + sum_k a_k cos(w_k t + p_k). Closed under linear
/// combination and time shift, with exact mean value, exact moving integrals
/// over sliding windows, and an exactly bounded primitive of the centered
/// part. Certified range bounds c0 -/+ sum|a_k| are cached; they are attained
/// suprema/infima for constants and single harmonics.
class QuasiPeriodicCoefficient {
 public:
  QuasiPeriodicCoefficient() = default;
  explicit QuasiPeriodicCoefficient(double constant,
                                    std::vector<Harmonic> harmonics = {});

  double operator()(double t) const;

  double constant_term() const { return constant_; }
  const std::vector<Harmonic>& harmonics() const { return harmonics_; }
  bool is_constant() const { return harmonics_.empty(); }
  /// Whether lower_bound()/upper_bound() equal the exact inf/sup over R.
  bool bounds_tight() const { return harmonics_.size() <= 1; }

  double mean_value() const { return constant_; }
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }

  /// Integral over [t - window, t], in closed form.
  double moving_integral(double t, double window) const;
  /// The same moving integral as a coefficient in t: constant c0*window,
  /// harmonics (2 a_k sin(w_k window / 2) / w_k, w_k, p_k - w_k window / 2).
  QuasiPeriodicCoefficient moving_integral_coefficient(double window) const;

  /// Primitive h of the centered coefficient: h' = this - mean_value(),
  /// h(t) = sum_k (a_k / w_k) sin(w_k t + p_k), bounded by sum|a_k|/w_k.
  QuasiPeriodicCoefficient bounded_primitive() const;

  /// t -> value at (t + delta).
  QuasiPeriodicCoefficient shifted(double delta) const;

  std::vector<double> frequencies() const;

  friend QuasiPeriodicCoefficient operator+(const QuasiPeriodicCoefficient& a,
                                            const QuasiPeriodicCoefficient& b);
  friend QuasiPeriodicCoefficient operator-(const QuasiPeriodicCoefficient& a,
                                            const QuasiPeriodicCoefficient& b);
  friend QuasiPeriodicCoefficient operator*(double a,
                                            const QuasiPeriodicCoefficient& c);

 private:
  void cache_bounds();

  double constant_ = 0.0;
  std::vector<Harmonic> harmonics_;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

struct ScanWindow {
  double t_scan;
  double step;
};

struct WindowSup {
  double value;
  double argmax;
  ScanWindow window;
};

/// Supremum estimate of f over [0, t_scan]: grid scan refined by a local
/// golden-section search around the best grid point. The result is a
/// certified lower bound for the supremum over R.
WindowSup window_sup(const std::function<double(double)>& f,
                     const ScanWindow& w);
WindowSup window_inf(const std::function<double(double)>& f,
                     const ScanWindow& w);

/// Default window for almost periodic scans: t_scan = 50 periods of the
/// slowest harmonic capped at 1e4, step = a fiftieth of the fastest period.
ScanWindow default_scan_window(const std::vector<double>& freqs);

}  // namespace expord
