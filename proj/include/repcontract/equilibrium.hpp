// Stage payoff tables, pure and mixed equilibria, and the closed-form
// expected utilities of the two-stage game.
//
// Discounting follows the weights (1, delta) on (stage 1, stage 2).
#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "repcontract/model.hpp"

namespace repcontract {

enum class SensorAction { T, NT };
enum class OperatorAction { V, NV };

std::string_view to_string(SensorAction a);
std::string_view to_string(OperatorAction a);

struct PayoffCell {
  double sensor = 0.0;
  double op = 0.0;
};

/// 2x2 stage game. `offered` is the table under the contract; `withdrawn`
/// is the same stage with the fresh reputation payment switched off
/// (h = gamma = 0), which is the operator's participation alternative.
/// Stage-2 entries include the carried payment (1 - omega) R1.
struct StagePayoffMatrix {
  int stage = 1;
  double effort = 0.0;
  double carried = 0.0;
  std::array<std::array<PayoffCell, 2>, 2> offered{};
  std::array<std::array<PayoffCell, 2>, 2> withdrawn{};

  const PayoffCell& at(SensorAction s, OperatorAction o) const {
    return offered[static_cast<int>(s)][static_cast<int>(o)];
  }
};

struct PureProfile {
  SensorAction sensor;
  OperatorAction op;
  bool contract_offered;

  friend bool operator==(const PureProfile&, const PureProfile&) = default;
};

/// 1 + (1 - omega) delta: total weight of a stage-1 reputation unit.
double effw(double omega, double delta);

StagePayoffMatrix stage_payoff_matrix(const GameConfig& cfg, const ContractParams& contract,
                                      int stage, double effort, double carried = 0.0);

/// Pure equilibria of the stage game. The operator's strategy is a pair
/// (offer or withdraw the contract, V or NV); a profile is returned when no
/// player gains more than `tol` from a unilateral deviation. Profiles equal
/// in (sensor, operator action) are reported once.
std::vector<PureProfile> pure_nash(const StagePayoffMatrix& matrix, double tol = 0.0);

struct StageMixedStrategy {
  int stage = 1;
  double p = 0.0;  // verification probability
  double q = 0.0;  // truthfulness probability
  double effort = 0.0;
  bool idle = false;  // zero effort: operator plays NV, no fresh payment
  bool valid = false;
  std::vector<Diagnostic> diagnostics;
};

struct EquilibriumProfile {
  double p1 = 0.0, p2 = 0.0, q1 = 0.0, q2 = 0.0;
  double x1 = 0.0, x2 = 0.0;
  bool stage1_idle = false, stage2_idle = false;
  bool valid = false;
  std::vector<Diagnostic> diagnostics;
};

enum class Method { ClosedForm, GameTree, MonteCarlo };
std::string_view to_string(Method m);

struct PayoffPair {
  double sensor = 0.0;
  double op = 0.0;
  Method method = Method::ClosedForm;
};

/// Indifference probabilities at stage 2. Throws std::domain_error if omega == 0.
StageMixedStrategy stage2_mixed(const GameConfig& cfg, const ContractParams& contract, double x2);
/// Same with effw(omega, delta) in place of omega.
StageMixedStrategy stage1_mixed(const GameConfig& cfg, const ContractParams& contract, double x1);

EquilibriumProfile mixed_profile(const GameConfig& cfg, const ContractParams& contract,
                                 double x1, double x2);

/// Expected discounted utilities under the mixed profile for (x1, x2).
/// Idle stages (zero effort) contribute only the carried payment.
/// Throws std::domain_error when h + gamma == 0 (and for operator_eu when omega == 0).
double sensor_eu(const GameConfig& cfg, const ContractParams& contract, double x1, double x2);
double operator_eu(const GameConfig& cfg, const ContractParams& contract, double x1, double x2);
PayoffPair closed_form_payoffs(const GameConfig& cfg, const ContractParams& contract,
                               double x1, double x2);

/// Stage-2 continuation values given carried reputation R1.
PayoffPair stage2_continuation(const GameConfig& cfg, const ContractParams& contract,
                               double r1, double x2);

}  // namespace repcontract
