#pragma once

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <vector>

namespace expord {

/// Sampled element of the phase space C([-r,0], R^m): one uniform grid per
/// component spanning [-r_i, 0], with value samples and (normally) derivative
/// samples. Immutable after construction; safe to share across threads.
class HistorySegment {
 public:
  enum class DerivFill { FiniteDifference, None };

  /// Empty segment (dim() == 0); fill it through the factories.
  HistorySegment() = default;

  /// Build from per-component samples. values[i] must hold
  /// round(delays[i]/step) + 1 entries spanning [-delays[i], 0] uniformly.
  /// Derivatives are filled by second-order finite differences unless
  /// fill == DerivFill::None.
  static HistorySegment make(std::vector<Eigen::ArrayXd> values,
                             const Eigen::ArrayXd& delays, double step,
                             DerivFill fill = DerivFill::FiniteDifference);

  /// Build from explicit value and derivative samples; grid spacing per
  /// component is delays[i] / (values[i].size() - 1).
  static HistorySegment make_with_derivs(std::vector<Eigen::ArrayXd> values,
                                         std::vector<Eigen::ArrayXd> derivs,
                                         const Eigen::ArrayXd& delays);

  /// Value samples only; eval interpolates linearly and Lipschitz-norm or
  /// interior tests are unavailable.
  static HistorySegment make_values_only(std::vector<Eigen::ArrayXd> values,
                                         const Eigen::ArrayXd& delays);

  /// Sample callables on uniform grids with spacing close to step; the
  /// derivative callables, when given, are sampled too, otherwise finite
  /// differences are used.
  static HistorySegment sample(
      const std::vector<std::function<double(double)>>& f,
      const Eigen::ArrayXd& delays, double step);
  static HistorySegment sample(
      const std::vector<std::function<double(double)>>& f,
      const std::vector<std::function<double(double)>>& df,
      const Eigen::ArrayXd& delays, double step);

  static HistorySegment constant(const Eigen::VectorXd& v,
                                 const Eigen::ArrayXd& delays, double step);

  int dim() const { return static_cast<int>(values_.size()); }
  const Eigen::ArrayXd& delays() const { return delays_; }
  double delay(int comp) const { return delays_[comp]; }
  double max_delay() const { return delays_.maxCoeff(); }
  double min_delay() const { return delays_.minCoeff(); }

  int points(int comp) const { return static_cast<int>(values_[comp].size()); }
  double grid_step(int comp) const;
  /// k-th grid abscissa of a component; exact at both ends (-r_i and 0).
  double grid_point(int comp, int k) const;
  const Eigen::ArrayXd& values(int comp) const { return values_[comp]; }
  const Eigen::ArrayXd& derivs(int comp) const;
  bool has_derivs() const { return has_derivs_; }

  /// Value at s in [-r_comp, 0]; cubic Hermite when derivatives are stored,
  /// piecewise linear otherwise. Reproduces stored values exactly at nodes.
  double eval(double s, int comp) const;
  double eval_deriv(double s, int comp) const;

  Eigen::VectorXd at_zero() const;   // phi(0)
  Eigen::VectorXd at_delay() const;  // (phi_i(-r_i))_i

  enum class NormKind { Sup, Lipschitz };
  /// Sup: max-abs value over all grids. Lipschitz: sup plus max-abs stored
  /// derivative, a discrete stand-in for the difference-quotient supremum.
  double norm(NormKind kind) const;
  double sup_norm() const { return norm(NormKind::Sup); }
  double lipschitz_norm() const { return norm(NormKind::Lipschitz); }

 private:
  Eigen::ArrayXd delays_;
  std::vector<Eigen::ArrayXd> values_;
  std::vector<Eigen::ArrayXd> derivs_;
  bool has_derivs_ = false;
};

/// alpha*x + y, pointwise on matching grids; derivatives combine linearly.
HistorySegment axpy(double alpha, const HistorySegment& x,
                    const HistorySegment& y);
/// alpha*x (axpy against the zero segment).
HistorySegment scale(double alpha, const HistorySegment& x);

bool same_grid(const HistorySegment& a, const HistorySegment& b);

/// Debug CSV, one row per node: component,s,value,deriv.
void write_csv(const HistorySegment& seg, std::ostream& os);

}  // namespace expord
