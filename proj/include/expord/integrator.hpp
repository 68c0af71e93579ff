#pragma once

#include <iosfwd>
#include <stdexcept>

#include "expord/history.hpp"
#include "expord/nicholson.hpp"

namespace expord {

struct BlowupError : std::runtime_error {
  BlowupError(const std::string& msg, double when)
      : std::runtime_error(msg), time(when) {}
  double time;
};

/// Dense fixed-step solution on [0, horizon]: node states and right-hand-side
/// samples with cubic Hermite interpolation in between, the initial history
/// behind t = 0. Immutable once returned by integrate().
class Trajectory {
 public:
  double step() const { return step_; }
  double horizon() const { return horizon_; }
  int dim() const { return static_cast<int>(states_.cols()); }
  int nodes() const { return static_cast<int>(states_.rows()); }
  double node_time(int k) const { return k * step_; }

  const Eigen::MatrixXd& states() const { return states_; }
  const Eigen::MatrixXd& derivs() const { return derivs_; }
  const HistorySegment& initial_history() const { return history_; }
  const NicholsonModel& model() const { return model_; }

  /// Dense value/derivative; t may dip below 0 down to -delay(comp), where
  /// the initial history answers.
  double value(double t, int comp) const;
  double deriv(double t, int comp) const;
  Eigen::VectorXd state(double t) const;

  /// The state segment y_t on per-component windows [-r_i, 0], sampled from
  /// the dense output with derivatives; valid input for cone tests and as a
  /// restart history.
  HistorySegment segment_at(double t) const;

 private:
  friend Trajectory integrate(const NicholsonModel&, const HistorySegment&,
                              double, double);
  Trajectory() = default;

  NicholsonModel model_;
  HistorySegment history_;
  double step_ = 0.0;
  double horizon_ = 0.0;
  Eigen::MatrixXd states_;  // nodes x m
  Eigen::MatrixXd derivs_;  // nodes x m
};

/// Method of steps with the classical 4-stage one-step scheme; delayed values
/// come from the already-computed dense output, which stays strictly in the
/// past because step <= min r_i / 4. Deterministic: identical inputs give
/// bit-identical trajectories. Throws BlowupError when a state turns
/// non-finite.
Trajectory integrate(const NicholsonModel& model, const HistorySegment& history,
                     double horizon, double step);

/// min r_i / 50: resolves every delay interval well below the interpolation
/// error floor.
double default_step(const NicholsonModel& model);

/// CSV with header t,y_1..y_m,dy_1..dy_m; one row per node (or every
/// `every`-th node).
void write_csv(const Trajectory& traj, std::ostream& os, int every = 1);

}  // namespace expord
