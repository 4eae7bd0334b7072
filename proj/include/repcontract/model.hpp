// Environment and contract parameters for the operator/sensor contracting
// game, plus the operator's benefit-function family.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace repcontract {

enum class BenefitFamily { Power, Log, SatExp };

std::string_view to_string(BenefitFamily family);
BenefitFamily parse_benefit_family(std::string_view name);

/// Operator benefit S(x), increasing and concave with S(0) = 0.
///   power:  a * x^shape        (shape in (0,1))
///   log:    a * ln(1 + x)      (shape unused)
///   satexp: a * (1 - e^{-shape x})
struct BenefitSpec {
  BenefitFamily family = BenefitFamily::Power;
  double a = 1.0;
  double shape = 0.5;
};

struct GameConfig {
  double b = 1.0;      // effort cost per unit effort
  double x_bar = 1.0;  // effort cap
  double C = 0.0;      // verification cost
  double delta = 1.0;  // discount factor, (0, 1]
  BenefitSpec benefit;
};

/// Operator design variables. The reputation floor after a detected
/// falsification is fixed at zero.
struct ContractParams {
  double h = 0.0;      // R(x_bar)
  double gamma = 0.0;  // boost for verified truthful reports
  double omega = 1.0;  // reputation weight in [0, 1]
  double l = 0.0;
};

struct Diagnostic {
  std::string name;
  double value = 0.0;
  std::string message;
};

struct ConfigReport {
  bool regime_ok = false;           // b x_bar > sqrt(C S(x_bar))
  bool cost_exceeds_verification = false;  // b x_bar > C
  bool benefit_shape_ok = false;    // sampled monotone + concave
  std::vector<Diagnostic> diagnostics;
};

/// Participation/existence summary of a contract at given efforts.
struct ValidityReport {
  bool mixed_exists = false;  // omega * h > C
  bool probs_in_range = false;
  bool operator_ir = false;
  bool sensor_ir = false;
  std::vector<Diagnostic> diagnostics;
};

/// Throws std::invalid_argument naming the offending field.
ConfigReport validate_config(const GameConfig& cfg);
void validate_contract(const ContractParams& contract);

double benefit(const GameConfig& cfg, double x);

/// Closed-form S'(x). The power family is undefined at x = 0; the log and
/// satexp families use the right limit there (a and a*shape).
double benefit_derivative(const GameConfig& cfg, double x);

enum class EffortBound { Interior, Lower, Upper };

struct EffortStar {
  double x = 0.0;
  EffortBound bound = EffortBound::Interior;
};

/// Effort with S'(x*) = b, clamped to [0, x_bar].
EffortStar effort_star_detail(const GameConfig& cfg);
double effort_star(const GameConfig& cfg);

/// Linear reputation R(z) = h z / x_bar. Exact at the endpoints:
/// R(0) = 0 and R(x_bar) = h.
double reputation(const GameConfig& cfg, const ContractParams& contract, double z);

}  // namespace repcontract
