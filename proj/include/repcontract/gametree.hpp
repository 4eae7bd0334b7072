// Exact evaluation of the two-stage game by enumerating every
// (truthful?, verified?) realization at both stages. This is the reference
// the closed forms are checked against.
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "repcontract/equilibrium.hpp"
#include "repcontract/model.hpp"

namespace repcontract {

/// Public outcome of one stage. Its index conditions stage-2 play.
enum class StageOutcome : int { TruthfulVerified = 0, TruthfulUnverified = 1, FalseVerified = 2, FalseUnverified = 3 };

inline constexpr int kOutcomes = 4;

inline bool truthful(StageOutcome o) { return static_cast<int>(o) < 2; }
inline bool verified(StageOutcome o) { return static_cast<int>(o) % 2 == 0; }
std::string_view to_string(StageOutcome o);

struct SensorStagePlan {
  double effort = 0.0;      // effort exerted when truthful
  double truth_prob = 1.0;  // probability of T
};

/// Sensor and operator play for both stages; stage-2 entries are indexed by
/// the stage-1 outcome.
struct BehavioralStrategy {
  SensorStagePlan sensor1;
  std::array<SensorStagePlan, kOutcomes> sensor2{};
  double verify1 = 0.0;
  std::array<double, kOutcomes> verify2{};

  static BehavioralStrategy stationary(SensorStagePlan s1, double p1, SensorStagePlan s2, double p2);
  /// Stationary play from a mixed profile; idle stages become (effort 0, T, NV).
  static BehavioralStrategy from_profile(const EquilibriumProfile& profile);
};

/// Throws std::invalid_argument if efforts or probabilities are out of range.
void validate_strategy(const GameConfig& cfg, const BehavioralStrategy& strat);

struct OutcomePath {
  StageOutcome first = StageOutcome::FalseUnverified;
  StageOutcome second = StageOutcome::FalseUnverified;
  double effort1 = 0.0, effort2 = 0.0;
  double carried = 0.0;  // stage-1 reputation R1
  double payment1 = 0.0, payment2 = 0.0;
  PayoffCell stage1, stage2;
  double probability = 0.0;
};

std::vector<OutcomePath> enumerate_paths(const GameConfig& cfg, const ContractParams& contract,
                                         const BehavioralStrategy& strat);

PayoffPair exact_payoffs(const GameConfig& cfg, const ContractParams& contract,
                         const BehavioralStrategy& strat);

struct OperatorPlan {
  double verify1 = 0.0;
  std::array<double, kOutcomes> verify2{};

  static OperatorPlan stationary(double p1, double p2) {
    return {p1, {p2, p2, p2, p2}};
  }
};

struct BestResponse {
  BehavioralStrategy strategy;
  double value = 0.0;
};

/// Best pure sensor plan against fixed operator verification probabilities.
/// Candidates per stage are T at each grid effort and NT; stage-2 choices
/// are made per stage-1 outcome. Ties go to the smallest effort, T before NT.
BestResponse sensor_best_response(const GameConfig& cfg, const ContractParams& contract,
                                  const OperatorPlan& op, std::span<const double> effort_grid);

struct Deviation {
  std::string player;  // "sensor" | "operator"
  int stage = 0;       // 1, 2, or 0 for a joint two-stage deviation
  std::string action;
  double gain = 0.0;
};

struct DeviationReport {
  std::vector<Deviation> deviations;
  double sensor_gain = 0.0;
  double operator_gain = 0.0;
  double max_gain = 0.0;
  double tolerance = 0.0;
  bool certified = false;

  const Deviation& worst() const;
};

DeviationReport check_equilibrium(const GameConfig& cfg, const ContractParams& contract,
                                  const EquilibriumProfile& profile,
                                  std::span<const double> effort_grid, double tol = 1e-9);

struct IndifferenceGaps {
  double sensor1 = 0.0, sensor2 = 0.0;
  double operator1 = 0.0, operator2 = 0.0;
  bool stage1_degenerate = false, stage2_degenerate = false;

  double max() const;
};

IndifferenceGaps indifference_gaps(const GameConfig& cfg, const ContractParams& contract,
                                   const EquilibriumProfile& profile);

/// n evenly spaced efforts on [0, x_bar] plus x*, sorted and deduplicated.
std::vector<double> default_effort_grid(const GameConfig& cfg, int n = 51);

}  // namespace repcontract
