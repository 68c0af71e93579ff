#include "expord/cone.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace expord {

ConeSpec::ConeSpec(Eigen::ArrayXd rates) : mu(std::move(rates)) {
  if (mu.size() == 0) {
    throw std::invalid_argument("cone: empty rate vector");
  }
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (!(mu[i] >= 0.0) || !std::isfinite(mu[i])) {
      throw std::invalid_argument("cone: rates must be finite and >= 0");
    }
  }
}

namespace {

void check_dim(const HistorySegment& phi, const ConeSpec& cone) {
  if (phi.dim() != cone.dim()) {
    throw std::invalid_argument("cone: dimension mismatch");
  }
}

}  // namespace

OrderReport cone_contains(const HistorySegment& phi, const ConeSpec& cone,
                          double tol) {
  check_dim(phi, cone);
  OrderReport rep;
  rep.tol = tol;
  rep.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < phi.dim(); ++i) {
    const auto& v = phi.values(i);
    const int n = phi.points(i);
    const double h = phi.grid_step(i);
    for (int k = 0; k < n; ++k) {
      double slack = v[k];
      if (phi.has_derivs()) {
        slack = std::min(slack, phi.derivs(i)[k] + cone.mu[i] * v[k]);
      } else if (k + 1 < n) {
        // Forward-difference proxy for phi' + mu phi on the last resort.
        slack = std::min(slack, (v[k + 1] - v[k]) / h + cone.mu[i] * v[k]);
      }
      if (slack < rep.margin) {
        rep.margin = slack;
        rep.where = {i, phi.grid_point(i, k)};
      }
    }
  }
  rep.holds = rep.margin >= -tol;
  return rep;
}

OrderReport leq_b(const HistorySegment& lo, const HistorySegment& hi,
                  const ConeSpec& cone, double tol) {
  return cone_contains(axpy(-1.0, lo, hi), cone, tol);
}

OrderReport in_interior(const HistorySegment& phi, const ConeSpec& cone,
                        double tol) {
  check_dim(phi, cone);
  if (!phi.has_derivs()) {
    throw std::logic_error("in_interior: derivatives required");
  }
  OrderReport rep;
  rep.tol = tol;
  rep.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < phi.dim(); ++i) {
    const auto& v = phi.values(i);
    const auto& d = phi.derivs(i);
    if (v[0] < rep.margin) {
      rep.margin = v[0];
      rep.where = {i, phi.grid_point(i, 0)};
    }
    for (int k = 0; k < phi.points(i); ++k) {
      const double slack = d[k] + cone.mu[i] * v[k];
      if (slack < rep.margin) {
        rep.margin = slack;
        rep.where = {i, phi.grid_point(i, k)};
      }
    }
  }
  rep.holds = rep.margin >= tol;
  return rep;
}

double part_metric(const HistorySegment& phi, const HistorySegment& psi,
                   const ConeSpec& cone, const PartMetricOptions& opts) {
  if (!same_grid(phi, psi)) {
    throw std::invalid_argument("part_metric: grid mismatch");
  }
  if (!in_interior(phi, cone, opts.interior_tol).holds ||
      !in_interior(psi, cone, opts.interior_tol).holds) {
    throw std::domain_error("part_metric: arguments must be strictly interior");
  }

  // ok(a) is monotone in a because phi itself lies in the cone.
  const auto ok = [&](double log_alpha) {
    const double a = std::exp(log_alpha);
    return leq_b(scale(1.0 / a, phi), psi, cone, opts.membership_tol).holds &&
           leq_b(psi, scale(a, phi), cone, opts.membership_tol).holds;
  };

  if (ok(0.0)) return 0.0;
  double lo = 0.0;
  double hi = std::max(opts.tol, 0.25);
  while (!ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > opts.log_alpha_max) {
      throw PartMetricUnbounded(
          "part_metric: no bracket below the configured alpha cap "
          "(infinite distance at this resolution)");
    }
  }
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace expord
