#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "expord/cone.hpp"
#include "expord/integrator.hpp"

namespace expord {

uint64_t derive_seed(uint64_t master, uint64_t index);

// Random segment generators for the verification harness. Cone members take
// the shape q e^{-mu s} g(s) with g positive and nondecreasing, so membership
// is structural; it is still certified by the cone tests before use
// (rejection sampling).
HistorySegment random_cone_element(const Eigen::ArrayXd& delays,
                                   const ConeSpec& cone, std::mt19937_64& rng,
                                   double amplitude = 1.0, bool interior = true,
                                   int points = 51);
HistorySegment random_interior_segment(const Eigen::ArrayXd& delays,
                                       const ConeSpec& cone,
                                       std::mt19937_64& rng,
                                       double amplitude = 1.0, int points = 51);
HistorySegment random_nonneg_history(const Eigen::ArrayXd& delays,
                                     std::mt19937_64& rng,
                                     bool zero_at_origin = false,
                                     double amplitude = 1.0, int points = 51);
HistorySegment random_positive_history(const Eigen::ArrayXd& delays,
                                       std::mt19937_64& rng,
                                       double amplitude = 1.0, int points = 51);

struct SampleOutcome {
  int index = 0;
  bool pass = false;
  double margin = 0.0;
  double time = 0.0;  // where the worst margin occurred
  std::string note;
};

struct VerificationReport {
  std::string claim;
  uint64_t seed = 0;
  double horizon = 0.0;
  double step = 0.0;
  std::map<std::string, double> params;
  std::vector<SampleOutcome> samples;
  double worst_margin = std::numeric_limits<double>::infinity();
  int passes = 0;
  int failures = 0;
  /// Set when the claim's sufficient conditions were not certified for this
  /// model, making the run informational.
  bool exploratory = false;

  bool all_pass() const { return failures == 0; }
  void push(SampleOutcome s);
};

struct HarnessOptions {
  double step = 0.0;  // 0: min r / 50
  double margin_tol = 1e-9;
  /// Additive slack on strict-membership margins: separations decay along
  /// contracting trajectories, so strictness is asserted as margin >= -tol,
  /// never against a positive floor. Margins are reported either way.
  double interior_tol = 1e-9;
  PartMetricOptions part;
};

/// Order preservation: random pairs phi <=_B psi = phi + cone element,
/// integrated together; the order is asserted at delay-spaced times, and the
/// differences of interior-separated pairs are asserted strictly interior.
VerificationReport verify_monotone(const NicholsonModel& model,
                                   const ConeSpec& cone, int pairs,
                                   double horizon, uint64_t seed,
                                   const HarnessOptions& opts = {});

/// Cone entry of nonnegative data: membership from one delay on, interior
/// membership from two delays on when phi(0) is strictly positive. Records
/// first entry times.
VerificationReport verify_cone_entry(const NicholsonModel& model,
                                     const ConeSpec& cone, int histories,
                                     uint64_t seed,
                                     const HarnessOptions& opts = {},
                                     double horizon = 0.0);
VerificationReport verify_cone_entry_for(
    const NicholsonModel& model, const ConeSpec& cone,
    const std::vector<HistorySegment>& histories,
    const HarnessOptions& opts = {}, double horizon = 0.0);

/// Sublinearity along trajectories: lambda y_t(psi) <=_B y_t(lambda psi) for
/// each lambda, with strict interior difference past one delay.
VerificationReport verify_sublinear(const NicholsonModel& model,
                                    const ConeSpec& cone,
                                    const HistorySegment& psi,
                                    const std::vector<double>& lambdas,
                                    double horizon,
                                    const HarnessOptions& opts = {});

struct PartMetricTrace {
  std::vector<double> times;
  std::vector<double> values;
  VerificationReport report;
};

/// p(y_t(phi), y_t(psi)) along a pair of interior trajectories, asserted
/// nonincreasing within twice the bisection tolerance. The trace starts at
/// t = 0 (the distance of the initial data) and continues from two delays on.
PartMetricTrace part_metric_trace(const NicholsonModel& model,
                                  const ConeSpec& cone,
                                  const HistorySegment& phi,
                                  const HistorySegment& psi, double horizon,
                                  const HarnessOptions& opts = {});

struct PersistenceResult {
  double floor = 0.0;
  bool persistent = false;
  VerificationReport report;
};

/// Empirical persistence floor: min over runs, tail times and patches of the
/// solution, for random histories positive at 0. Measured, never certified.
PersistenceResult persistence_floor(const NicholsonModel& model, int histories,
                                    double transient, double horizon,
                                    uint64_t seed, double floor_tol = 1e-4,
                                    const HarnessOptions& opts = {});
PersistenceResult persistence_floor_for(
    const NicholsonModel& model, const std::vector<HistorySegment>& histories,
    double transient, double horizon, double floor_tol = 1e-4,
    const HarnessOptions& opts = {});

struct AttractorEstimate {
  Eigen::ArrayXd times;        // report grid inside [transient, horizon]
  Eigen::MatrixXd base_orbit;  // times x m, mean over runs
  Eigen::ArrayXd spread;       // max pairwise sup distance per time
  double tail_spread = 0.0;    // max of spread over the grid
  double floor = 0.0;          // min state over grid, runs and patches
  bool copy_of_base = false;   // tail_spread < spread_tol
  double spread_tol = 0.0;
  VerificationReport report;
};

/// Attractor estimate from strictly positive random histories: after the
/// transient all runs are averaged into one candidate orbit and their
/// pairwise spread is tracked; a collapsing spread is the observable trace of
/// a single attracting orbit.
AttractorEstimate attractor_estimate(const NicholsonModel& model, int initials,
                                     double transient, double horizon,
                                     uint64_t seed, double spread_tol = 1e-3,
                                     const HarnessOptions& opts = {});

enum class EquilibriumSide { Sub, Super };

/// Constant-state semiequilibrium test: for a constant map the time
/// derivative vanishes, so v is a sub-solution when F(t, v) >= 0 for all
/// scanned t (super: <= 0). Certified interval bounds accompany the scan;
/// a strictly one-signed margin is reported as the strong variant.
VerificationReport check_subequilibrium(const NicholsonModel& model,
                                        const Eigen::VectorXd& level,
                                        EquilibriumSide side,
                                        std::optional<ScanWindow> window = {});

}  // namespace expord
