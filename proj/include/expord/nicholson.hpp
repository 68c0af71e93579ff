#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "expord/cone.hpp"
#include "expord/history.hpp"
#include "expord/quasiperiodic.hpp"

namespace expord {

/// Model coefficient: either an exact quasi-periodic sum, or a general
/// closed-form evaluable carrying certified range bounds when the structure
/// provides them (the coefficients produced by the mean-value change of
/// variables are of the form base(t) * exp(expo(t)) with both factors exact).
class Coefficient {
 public:
  Coefficient() : Coefficient(QuasiPeriodicCoefficient(0.0)) {}
  Coefficient(QuasiPeriodicCoefficient qp);  // implicit by design
  Coefficient(double constant) : Coefficient(QuasiPeriodicCoefficient(constant)) {}

  static Coefficient evaluable(std::function<double(double)> fn,
                               std::optional<double> lower,
                               std::optional<double> upper,
                               std::vector<double> scan_freqs = {},
                               bool bounds_tight = false);

  /// base(t) * exp(expo(t)) with certified bounds; requires base >= 0.
  /// Bounds are attained when base is constant and expo has tight bounds.
  static Coefficient product_with_exp(const QuasiPeriodicCoefficient& base,
                                      const QuasiPeriodicCoefficient& expo);

  double operator()(double t) const;

  bool exact() const { return exact_; }
  const QuasiPeriodicCoefficient& quasiperiodic() const;

  std::optional<double> lower_bound() const { return lower_; }
  std::optional<double> upper_bound() const { return upper_; }
  bool bounds_tight() const { return tight_; }
  const std::vector<double>& scan_freqs() const { return freqs_; }
  bool is_zero() const;

 private:
  bool exact_;
  QuasiPeriodicCoefficient qp_;
  std::function<double(double)> fn_;
  std::optional<double> lower_, upper_;
  bool tight_ = false;
  std::vector<double> freqs_;
};

/// Nicholson patch model
///   y_i' = -d_i(t) y_i + sum_j a_ij(t) y_j
///          + beta_i(t) y_i(t - r_i) e^{-c_i(t) y_i(t - r_i)},
/// with all coefficients evaluated at (t + offset). The offset realises a
/// concrete point of the hull of the coefficients: translating it moves the
/// whole system along the driving flow.
struct NicholsonModel {
  Eigen::ArrayXd delays;                          // r_i > 0
  std::vector<Coefficient> decay;                 // d_i
  std::vector<std::vector<Coefficient>> migration;  // a_ij, zero diagonal
  std::vector<Coefficient> birth;                 // beta_i
  std::vector<Coefficient> saturation;            // c_i
  double offset = 0.0;

  int patches() const { return static_cast<int>(delays.size()); }
  NicholsonModel translated(double s) const;
  /// Throws std::invalid_argument on structural defects (size mismatches,
  /// nonpositive delays, nonzero migration diagonal).
  void check_structure() const;
  /// Union of harmonic frequencies, for scan-window defaults.
  std::vector<double> scan_freqs() const;
};

/// Right-hand side at time t for the state segment seg.
Eigen::VectorXd rhs(const NicholsonModel& model, double t,
                    const HistorySegment& seg);

enum class Verdict { HoldsStrict, HoldsNonStrict, Fails, IndeterminateWithinScan };
const char* to_string(Verdict v);
/// The worse of two verdicts (fails > indeterminate > non-strict > strict).
Verdict worst(Verdict a, Verdict b);

/// One tested inequality with per-patch values. `certified` holds analytic
/// bounds (upper bounds for "less" relations, lower bounds for "greater"),
/// `observed` the scan extremum from exact point evaluations. margin is the
/// certified distance to the threshold, positive when the relation holds.
struct InequalityResult {
  std::string name;
  bool less;    // true: value (<|<=) threshold, false: value (>|>=) threshold
  bool strict;
  double threshold;
  Eigen::ArrayXd certified;
  Eigen::ArrayXd observed;
  Verdict verdict;
  double margin;
  int binding_patch;
  std::optional<ScanWindow> window;
};

struct ConditionReport {
  std::vector<InequalityResult> entries;
  Verdict overall = Verdict::HoldsStrict;

  const InequalityResult* find(const std::string& name) const;
};

InequalityResult check_inequality(std::string name, bool less, bool strict,
                                  double threshold, Eigen::ArrayXd certified,
                                  Eigen::ArrayXd observed,
                                  std::optional<ScanWindow> window = {});

/// Hypotheses on the coefficients: positive decay, nonnegative migration,
/// positive birth and saturation rates, and positive net mortality
/// d_i - sum_j a_ji. Certified bounds decide where possible; scans refine,
/// and conditions whose truth lies between scan value and analytic bound
/// come back indeterminate-within-scan.
ConditionReport validate_model(const NicholsonModel& model,
                               std::optional<ScanWindow> window = {});

/// Rate formula mu = (1/r) ln(e^2 / (r beta_sup)) and the auxiliary margin
/// map it maximises, g(mu) = -d_sup + mu - (beta_sup/e^2) e^{mu r}.
double cone_rate(double delay, double birth_sup);
double quasimonotone_margin(double mu, double delay, double birth_sup,
                            double decay_sup);
double quasimonotone_margin_slope(double mu, double delay, double birth_sup);

struct ConeBuild {
  bool ok = false;
  Eigen::ArrayXd mu;                  // negative entries mark failed patches
  Eigen::ArrayXd margin_at_mu;        // quasimonotone margin at mu
  Eigen::ArrayXd delay_birth_product; // r_i * beta_i^+
  ConeSpec cone() const;              // throws when !ok
};

/// Cone rates from the model bounds; fails (ok = false) when some
/// r_i beta_i^+ exceeds e^2 so the rate formula turns negative.
ConeBuild cone_from_model(const NicholsonModel& model);

/// Delay pressure r_i beta_i^+ e^{d_i^+ r_i} against e (non-strict and
/// strict), plus a direct scan of the quasimonotonicity gap
/// beta_i(t) <= (mu_i - d_i(t)) e^{2 - mu_i r_i} for the built cone rates.
/// The report's overall verdict is the strict entry's.
ConditionReport check_monotone(const NicholsonModel& model,
                               std::optional<ScanWindow> window = {});

/// Averaged delay pressure r_i sup_t beta_i(t) e^{int_{t-r_i}^t d_i} against
/// e: the relaxation that absorbs decay oscillation around its mean.
/// Requires exact quasi-periodic decay and birth coefficients.
ConditionReport check_relaxed(const NicholsonModel& model,
                              std::optional<ScanWindow> window = {});

/// Mean-value change of variables z_i(t) = e^{h_i(t)} y_i(t) with h_i the
/// bounded primitive of the centered decay: the transformed model has
/// constant decay equal to the mean, and rescaled migration, birth and
/// saturation coefficients carried as evaluables with certified bounds.
struct MeanTransform {
  NicholsonModel transformed;
  std::vector<QuasiPeriodicCoefficient> primitives;  // h_i
  Eigen::ArrayXd mean_decay;
  Eigen::ArrayXd gauge_lower, gauge_upper;  // range of e^{-h_i}
  ConeBuild cone;
};
MeanTransform transform_mean(const NicholsonModel& model);

struct RadiusResult {
  double radius = 0.0;
  int binding_patch = -1;
  Eigen::ArrayXd per_patch;
};

/// Smallest R0 such that every constant state R >= R0 is a super-solution:
/// certified per patch via sup_t[-(d_i - sum_j a_ij)] R + beta_i^+ R
/// e^{-c_{i,inf} R} <= 0, located by bracketing and bisection. Throws
/// std::runtime_error when no radius exists below cap.
RadiusResult superequilibrium_radius(const NicholsonModel& model,
                                     double cap = 1e3);

/// Small-delay conditions for special (entire) solutions of the scalar
/// equation: the global-Lipschitz product L r e < 1 with L = d^+ + beta^+,
/// the exponential-ordering bound r beta^+ e^{d^+ r} < 1/e, and their
/// averaged counterparts obtained through the mean-value change of
/// variables. Scalar models only.
ConditionReport special_solution_conditions(const NicholsonModel& model,
                                            std::optional<ScanWindow> window = {});

}  // namespace expord
