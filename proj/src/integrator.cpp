#include "expord/integrator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "expord/report_io.hpp"

namespace expord {

namespace {

// Hermite basis on one node interval; reproduces the end states exactly at
// theta = 0 and 1.
double hermite(double y0, double d0, double y1, double d1, double h,
               double th) {
  const double t2 = th * th, t3 = t2 * th;
  return y0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + th) +
         y1 * (-2 * t3 + 3 * t2) + h * d1 * (t3 - t2);
}

double hermite_deriv(double y0, double d0, double y1, double d1, double h,
                     double th) {
  const double t2 = th * th;
  return (y0 * (6 * t2 - 6 * th) + h * d0 * (3 * t2 - 4 * th + 1) +
          y1 * (-6 * t2 + 6 * th) + h * d1 * (3 * t2 - 2 * th)) /
         h;
}

struct NodePos {
  int k;
  double theta;
};

NodePos locate_node(double t, double step, int nodes) {
  const double u = t / step;
  const auto nearest = static_cast<long>(std::lround(u));
  if (std::abs(u - nearest) < 1e-9 && nearest >= 0 && nearest < nodes) {
    if (nearest == nodes - 1) return {nodes - 2, 1.0};
    return {static_cast<int>(nearest), 0.0};
  }
  int k = static_cast<int>(std::floor(u));
  k = std::max(0, std::min(k, nodes - 2));
  return {k, u - k};
}

}  // namespace

// Queries this close to t = 0 snap onto the solution side of the initial
// kink: a state segment reaching back to the start time needs the one-sided
// derivative from inside its own window, not the history's left slope.
static constexpr double kOriginSnap = 1e-12;

double Trajectory::value(double t, int comp) const {
  if (t < -kOriginSnap) return history_.eval(t, comp);
  if (t > horizon_ * (1.0 + 1e-12) + 1e-12) {
    throw std::out_of_range("trajectory: query beyond the computed horizon");
  }
  if (t <= 0.0) return states_(0, comp);
  const auto [k, th] = locate_node(t, step_, nodes());
  if (th == 0.0) return states_(k, comp);
  if (th == 1.0) return states_(k + 1, comp);
  return hermite(states_(k, comp), derivs_(k, comp), states_(k + 1, comp),
                 derivs_(k + 1, comp), step_, th);
}

double Trajectory::deriv(double t, int comp) const {
  if (t < -kOriginSnap) return history_.eval_deriv(t, comp);
  if (t > horizon_ * (1.0 + 1e-12) + 1e-12) {
    throw std::out_of_range("trajectory: query beyond the computed horizon");
  }
  if (t <= 0.0) return derivs_(0, comp);
  const auto [k, th] = locate_node(t, step_, nodes());
  if (th == 0.0) return derivs_(k, comp);
  if (th == 1.0) return derivs_(k + 1, comp);
  return hermite_deriv(states_(k, comp), derivs_(k, comp), states_(k + 1, comp),
                       derivs_(k + 1, comp), step_, th);
}

Eigen::VectorXd Trajectory::state(double t) const {
  Eigen::VectorXd out(dim());
  for (int i = 0; i < dim(); ++i) out[i] = value(t, i);
  return out;
}

HistorySegment Trajectory::segment_at(double t) const {
  if (t < -1e-12 || t > horizon_ * (1.0 + 1e-12) + 1e-12) {
    throw std::out_of_range("segment_at: time outside [0, horizon]");
  }
  const int m = dim();
  std::vector<Eigen::ArrayXd> values(m), slopes(m);
  for (int i = 0; i < m; ++i) {
    const double r = model_.delays[i];
    const int n = std::max(2, static_cast<int>(std::lround(r / step_)) + 1);
    values[i].resize(n);
    slopes[i].resize(n);
    for (int k = 0; k < n; ++k) {
      const double s = -r * (double(n - 1 - k) / double(n - 1));
      values[i][k] = value(t + s, i);
      slopes[i][k] = deriv(t + s, i);
    }
  }
  return HistorySegment::make_with_derivs(std::move(values), std::move(slopes),
                                          model_.delays);
}

namespace {

// One right-hand-side evaluation with the instantaneous part taken from the
// stage state and the delayed part from the dense output.
Eigen::VectorXd stage_rhs(const NicholsonModel& model, double t,
                          const Eigen::VectorXd& now,
                          const Eigen::VectorXd& lagged) {
  const double tt = t + model.offset;
  const int m = model.patches();
  Eigen::VectorXd out(m);
  for (int i = 0; i < m; ++i) {
    double v = -model.decay[i](tt) * now[i];
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      v += model.migration[i][j](tt) * now[j];
    }
    v += model.birth[i](tt) * lagged[i] *
         std::exp(-model.saturation[i](tt) * lagged[i]);
    out[i] = v;
  }
  return out;
}

}  // namespace

Trajectory integrate(const NicholsonModel& model, const HistorySegment& history,
                     double horizon, double step) {
  model.check_structure();
  const int m = model.patches();
  if (history.dim() != m) {
    throw std::invalid_argument("integrate: history dimension mismatch");
  }
  for (int i = 0; i < m; ++i) {
    if (std::abs(history.delay(i) - model.delays[i]) >
        1e-12 * std::max(1.0, model.delays[i])) {
      throw std::invalid_argument("integrate: history delays differ from model");
    }
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("integrate: step must be positive");
  }
  const double rmin = model.delays.minCoeff();
  if (step > rmin / 4.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "integrate: step must not exceed min delay / 4 so delayed lookups "
        "stay in the computed past");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("integrate: horizon must be positive");
  }

  Trajectory traj;
  traj.model_ = model;
  traj.history_ = history;
  traj.step_ = step;
  const auto n_steps = static_cast<long>(std::ceil(horizon / step - 1e-9));
  traj.horizon_ = n_steps * step;
  traj.states_.resize(n_steps + 1, m);
  traj.derivs_.resize(n_steps + 1, m);

  // Delayed lookup against the partially built trajectory; stages only ever
  // reach at most min r behind the current node, which is already computed.
  auto lagged_at = [&traj, &model, m](double t) {
    Eigen::VectorXd lag(m);
    for (int i = 0; i < m; ++i) {
      lag[i] = traj.value(t - model.delays[i], i);
    }
    return lag;
  };

  for (int i = 0; i < m; ++i) traj.states_(0, i) = history.eval(0.0, i);
  {
    const Eigen::VectorXd y0 = traj.states_.row(0);
    traj.derivs_.row(0) = stage_rhs(model, 0.0, y0, lagged_at(0.0));
  }

  const double h = step;
  for (long n = 0; n < n_steps; ++n) {
    const double tn = n * h;
    const Eigen::VectorXd y = traj.states_.row(n);
    const Eigen::VectorXd k1 = traj.derivs_.row(n);
    const Eigen::VectorXd lag_half = lagged_at(tn + 0.5 * h);
    const Eigen::VectorXd k2 =
        stage_rhs(model, tn + 0.5 * h, y + 0.5 * h * k1, lag_half);
    const Eigen::VectorXd k3 =
        stage_rhs(model, tn + 0.5 * h, y + 0.5 * h * k2, lag_half);
    const Eigen::VectorXd lag_full = lagged_at(tn + h);
    const Eigen::VectorXd k4 = stage_rhs(model, tn + h, y + h * k3, lag_full);
    const Eigen::VectorXd y1 =
        y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y1.allFinite()) {
      throw BlowupError("integrate: non-finite state at t = " +
                            std::to_string((n + 1) * h),
                        (n + 1) * h);
    }
    traj.states_.row(n + 1) = y1;
    traj.derivs_.row(n + 1) = stage_rhs(model, tn + h, y1, lag_full);
  }
  return traj;
}

double default_step(const NicholsonModel& model) {
  return model.delays.minCoeff() / 50.0;
}

void write_csv(const Trajectory& traj, std::ostream& os, int every) {
  if (every < 1) every = 1;
  const int m = traj.dim();
  os << 't';
  for (int i = 1; i <= m; ++i) os << ",y_" << i;
  for (int i = 1; i <= m; ++i) os << ",dy_" << i;
  os << '\n';
  for (int k = 0; k < traj.nodes(); k += every) {
    os << format_double(traj.node_time(k));
    for (int i = 0; i < m; ++i) os << ',' << format_double(traj.states()(k, i));
    for (int i = 0; i < m; ++i) os << ',' << format_double(traj.derivs()(k, i));
    os << '\n';
  }
}

}  // namespace expord
