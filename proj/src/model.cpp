#include "repcontract/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace repcontract {

namespace {

constexpr int kShapeSamples = 1000;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void require_finite(double v, const char* field) {
  require(std::isfinite(v), std::string(field) + " must be finite");
}

}  // namespace

std::string_view to_string(BenefitFamily family) {
  switch (family) {
    case BenefitFamily::Power: return "power";
    case BenefitFamily::Log: return "log";
    case BenefitFamily::SatExp: return "satexp";
  }
  return "unknown";
}

BenefitFamily parse_benefit_family(std::string_view name) {
  if (name == "power") return BenefitFamily::Power;
  if (name == "log") return BenefitFamily::Log;
  if (name == "satexp") return BenefitFamily::SatExp;
  throw std::invalid_argument("benefit.family must be one of power, log, satexp (got '" +
                              std::string(name) + "')");
}

ConfigReport validate_config(const GameConfig& cfg) {
  require_finite(cfg.b, "b");
  require_finite(cfg.x_bar, "x_bar");
  require_finite(cfg.C, "C");
  require_finite(cfg.delta, "delta");
  require_finite(cfg.benefit.a, "benefit.a");
  require_finite(cfg.benefit.shape, "benefit.shape");
  require(cfg.b > 0.0, "b must be positive");
  require(cfg.x_bar > 0.0, "x_bar must be positive");
  require(cfg.C >= 0.0, "C must be non-negative");
  require(cfg.delta > 0.0 && cfg.delta <= 1.0, "delta must lie in (0, 1]");
  require(cfg.benefit.a > 0.0, "benefit.a must be positive");
  switch (cfg.benefit.family) {
    case BenefitFamily::Power:
      require(cfg.benefit.shape > 0.0 && cfg.benefit.shape < 1.0,
              "benefit.shape must lie in (0, 1) for the power family");
      break;
    case BenefitFamily::SatExp:
      require(cfg.benefit.shape > 0.0, "benefit.shape must be positive for the satexp family");
      break;
    case BenefitFamily::Log:
      break;
  }

  ConfigReport report;
  const double bx = cfg.b * cfg.x_bar;
  const double s_max = benefit(cfg, cfg.x_bar);
  const double threshold = std::sqrt(cfg.C * s_max);
  report.regime_ok = bx > threshold;
  report.cost_exceeds_verification = bx > cfg.C;
  if (!report.regime_ok) {
    report.diagnostics.push_back(
        {"regime", bx - threshold, "b*x_bar <= sqrt(C*S(x_bar)); optimal-contract results do not apply"});
  }
  if (!report.cost_exceeds_verification) {
    report.diagnostics.push_back(
        {"verification_cost", bx - cfg.C, "b*x_bar <= C; truthfulness probability 1 - C/(b*x_bar) is not positive"});
  }

  // Sampled shape check: strictly increasing, secant slopes nonincreasing.
  report.benefit_shape_ok = true;
  const double step = cfg.x_bar / kShapeSamples;
  double prev = benefit(cfg, 0.0);
  double prev_slope = INFINITY;
  if (prev != 0.0) {
    report.benefit_shape_ok = false;
    report.diagnostics.push_back({"benefit_origin", prev, "S(0) != 0"});
  }
  for (int i = 1; i <= kShapeSamples; ++i) {
    const double x = (i == kShapeSamples) ? cfg.x_bar : i * step;
    const double s = benefit(cfg, x);
    const double slope = (s - prev) / step;
    if (!(s > prev)) {
      report.benefit_shape_ok = false;
      report.diagnostics.push_back({"benefit_increasing", x, "S not strictly increasing on the sample grid"});
      break;
    }
    if (slope > prev_slope * (1.0 + 1e-9)) {
      report.benefit_shape_ok = false;
      report.diagnostics.push_back({"benefit_concave", x, "secant slope increased on the sample grid"});
      break;
    }
    prev = s;
    prev_slope = slope;
  }
  return report;
}

void validate_contract(const ContractParams& contract) {
  require_finite(contract.h, "h");
  require_finite(contract.gamma, "gamma");
  require_finite(contract.omega, "omega");
  require(contract.h >= 0.0, "h must be non-negative");
  require(contract.gamma >= 0.0, "gamma must be non-negative");
  require(contract.omega >= 0.0 && contract.omega <= 1.0, "omega must lie in [0, 1]");
  require(contract.l == 0.0, "l (reputation floor) is fixed at 0");
}

double benefit(const GameConfig& cfg, double x) {
  if (!(x >= 0.0 && x <= cfg.x_bar)) {
    throw std::domain_error("benefit: effort " + std::to_string(x) + " outside [0, x_bar]");
  }
  if (x == 0.0) return 0.0;
  const auto& s = cfg.benefit;
  switch (s.family) {
    case BenefitFamily::Power: return s.a * std::pow(x, s.shape);
    case BenefitFamily::Log: return s.a * std::log1p(x);
    case BenefitFamily::SatExp: return -s.a * std::expm1(-s.shape * x);
  }
  return 0.0;
}

double benefit_derivative(const GameConfig& cfg, double x) {
  if (!(x >= 0.0 && x <= cfg.x_bar)) {
    throw std::domain_error("benefit_derivative: effort " + std::to_string(x) + " outside [0, x_bar]");
  }
  const auto& s = cfg.benefit;
  switch (s.family) {
    case BenefitFamily::Power:
      if (x == 0.0) throw std::domain_error("benefit_derivative: power family is unbounded at x = 0");
      return s.a * s.shape * std::pow(x, s.shape - 1.0);
    case BenefitFamily::Log: return s.a / (1.0 + x);
    case BenefitFamily::SatExp: return s.a * s.shape * std::exp(-s.shape * x);
  }
  return 0.0;
}

EffortStar effort_star_detail(const GameConfig& cfg) {
  const auto& s = cfg.benefit;
  double x = 0.0;
  switch (s.family) {
    case BenefitFamily::Power:
      x = std::pow(s.a * s.shape / cfg.b, 1.0 / (1.0 - s.shape));
      break;
    case BenefitFamily::Log:
      if (s.a <= cfg.b) return {0.0, EffortBound::Lower};
      x = s.a / cfg.b - 1.0;
      break;
    case BenefitFamily::SatExp:
      if (s.a * s.shape <= cfg.b) return {0.0, EffortBound::Lower};
      x = std::log(s.a * s.shape / cfg.b) / s.shape;
      break;
  }
  if (x >= cfg.x_bar) return {cfg.x_bar, EffortBound::Upper};
  if (x <= 0.0) return {0.0, EffortBound::Lower};
  return {x, EffortBound::Interior};
}

double effort_star(const GameConfig& cfg) { return effort_star_detail(cfg).x; }

double reputation(const GameConfig& cfg, const ContractParams& contract, double z) {
  return contract.h * (z / cfg.x_bar);
}

}  // namespace repcontract
