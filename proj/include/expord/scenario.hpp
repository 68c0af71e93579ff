#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "expord/analysis.hpp"
#include "expord/nicholson.hpp"

namespace expord {

struct ScenarioParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// History literal: a constant state vector, or one coefficient expression
/// per component evaluated over [-r_i, 0].
struct HistoryLiteral {
  std::optional<Eigen::VectorXd> constant;
  std::optional<std::vector<QuasiPeriodicCoefficient>> expr;

  HistorySegment materialize(const Eigen::ArrayXd& delays, double step) const;
};

struct SimulationBlock {
  double horizon = 50.0;
  double step = 0.0;  // 0: min r / 50
  double offset = 0.0;
  int output_every = 1;
  std::vector<HistoryLiteral> histories;
};

struct PersistenceBlock {
  int histories = 10;
  double transient = 0.0;  // 0: 0.6 * horizon
  double horizon = 100.0;
  double floor_tol = 1e-4;
};

struct SubequilibriumBlock {
  std::vector<Eigen::VectorXd> levels;
  EquilibriumSide side = EquilibriumSide::Sub;
  double t_scan = 0.0;  // 0: default window
};

struct VerifyBlock {
  uint64_t seed = 1;
  double horizon = 30.0;
  double step = 0.0;
  double margin_tol = 1e-9;
  double interior_tol = 1e-9;
  std::optional<int> monotone_pairs;
  std::optional<int> cone_entry_histories;
  std::optional<std::vector<double>> sublinear_lambdas;
  std::optional<int> part_metric_pairs;
  std::optional<PersistenceBlock> persistence;
  std::optional<SubequilibriumBlock> subequilibrium;

  bool empty() const {
    return !monotone_pairs && !cone_entry_histories && !sublinear_lambdas &&
           !part_metric_pairs && !persistence && !subequilibrium;
  }
};

struct AttractorBlock {
  int initials = 10;
  double transient = 300.0;
  double horizon = 500.0;
  uint64_t seed = 1;
  double spread_tol = 1e-3;
  double step = 0.0;
};

struct OutputBlock {
  std::string dir = "out";
};

struct Scenario {
  std::string stem;
  NicholsonModel model;
  std::optional<Eigen::ArrayXd> cone_mu;  // explicit rate override
  SimulationBlock sim;
  std::optional<VerifyBlock> verify;
  std::optional<AttractorBlock> attractor;
  OutputBlock output;
};

/// Parse and validate a scenario file. Unknown keys are rejected; messages
/// carry the offending location.
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const nlohmann::json& j, const std::string& stem);
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace expord
