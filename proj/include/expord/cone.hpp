#pragma once

#include <stdexcept>
#include <string>

#include "expord/history.hpp"

namespace expord {

/// Rates mu_i >= 0 defining the exponential ordering through the diagonal
/// quasipositive matrix with entries -mu_i. A segment phi lies in the
/// positive cone of this ordering when phi >= 0 and t -> e^{mu_i t} phi_i(t)
/// is nondecreasing, which for smooth maps reads phi_i' + mu_i phi_i >= 0.
struct ConeSpec {
  Eigen::ArrayXd mu;

  explicit ConeSpec(Eigen::ArrayXd rates);
  int dim() const { return static_cast<int>(mu.size()); }
};

struct OrderLocation {
  int component = -1;
  double s = 0.0;
};

/// Outcome of one order test: the smallest slack found over the grid and
/// where it occurred. Membership tests pass when margin >= -tol; interior
/// tests demand margin >= tol.
struct OrderReport {
  bool holds = false;
  double margin = 0.0;
  OrderLocation where;
  double tol = 0.0;
};

/// phi in the cone: min over the grid of min(phi_i, phi_i' + mu_i phi_i).
/// Falls back to forward differences when derivatives are absent.
OrderReport cone_contains(const HistorySegment& phi, const ConeSpec& cone,
                          double tol = 1e-12);

/// lo <=_B hi, tested as cone membership of hi - lo.
OrderReport leq_b(const HistorySegment& lo, const HistorySegment& hi,
                  const ConeSpec& cone, double tol = 1e-12);

/// Strict interior membership in the Lipschitz space: phi_i(-r_i) and the
/// slack phi_i' + mu_i phi_i must both stay at or above tol.
OrderReport in_interior(const HistorySegment& phi, const ConeSpec& cone,
                        double tol = 1e-12);

struct PartMetricUnbounded : std::runtime_error {
  explicit PartMetricUnbounded(const std::string& msg)
      : std::runtime_error(msg) {}
};

struct PartMetricOptions {
  double tol = 1e-6;            // absolute tolerance on ln(alpha)
  double log_alpha_max = 30.0;  // bracket cap before reporting "infinite"
  double membership_tol = 1e-12;
  double interior_tol = 1e-12;  // strictness demanded of both arguments
};

/// Part metric p(phi,psi) = inf{ ln a : a >= 1, a^{-1} phi <=_B psi <=_B
/// a phi } on the cone interior, computed by bisection on ln a with leq_b as
/// the membership oracle. Throws std::domain_error when an argument is not
/// strictly interior and PartMetricUnbounded when no bracket exists below
/// exp(log_alpha_max).
double part_metric(const HistorySegment& phi, const HistorySegment& psi,
                   const ConeSpec& cone, const PartMetricOptions& opts = {});

}  // namespace expord
