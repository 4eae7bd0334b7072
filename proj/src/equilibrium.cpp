#include "repcontract/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

namespace repcontract {

namespace {

constexpr double kRangeSlack = 1e-12;

bool in_unit(double v) { return v >= -kRangeSlack && v <= 1.0 + kRangeSlack; }

void check_stage_effort(const GameConfig& cfg, double x, const char* who) {
  if (!(x >= 0.0 && x <= cfg.x_bar)) {
    throw std::domain_error(std::string(who) + ": effort outside [0, x_bar]");
  }
}

double require_positive_mass(const ContractParams& contract, const char* who) {
  const double mass = contract.h + contract.gamma;
  if (!(mass > 0.0)) {
    throw std::domain_error(std::string(who) + ": degenerate contract (h + gamma == 0)");
  }
  return mass;
}

// Shared by both stages; `weight` is omega at stage 2 and effw at stage 1.
StageMixedStrategy stage_mixed(const GameConfig& cfg, const ContractParams& contract, int stage,
                               double weight, double x) {
  StageMixedStrategy s;
  s.stage = stage;
  s.effort = x;
  const bool exists = contract.omega * contract.h > cfg.C;
  if (!exists) {
    s.diagnostics.push_back({"omega*h<=C", contract.omega * contract.h - cfg.C,
                             "ωh≤C: no mixed equilibrium; the sensor always plays NT (outside option)"});
  }
  if (x == 0.0) {
    // No effort to verify: the operator plays NV and the stage is idle.
    s.idle = true;
    s.p = 0.0;
    s.q = 1.0;
    s.valid = exists;
    return s;
  }
  const double mass = contract.h + contract.gamma;
  if (!(mass > 0.0)) {
    s.diagnostics.push_back({"h+gamma==0", mass, "degenerate contract: probabilities undefined"});
    s.valid = false;
    return s;
  }
  const double r = reputation(cfg, contract, x);
  s.p = (contract.h - r + cfg.b * x / weight) / mass;
  s.q = (contract.h - cfg.C / weight) / mass;
  bool ok = exists;
  if (!in_unit(s.p)) {
    ok = false;
    s.diagnostics.push_back({stage == 1 ? "p1_range" : "p2_range", s.p, "verification probability outside [0, 1]"});
  }
  if (!in_unit(s.q)) {
    ok = false;
    s.diagnostics.push_back({stage == 1 ? "q1_range" : "q2_range", s.q, "truthfulness probability outside [0, 1]"});
  }
  s.valid = ok;
  return s;
}

}  // namespace

std::string_view to_string(SensorAction a) { return a == SensorAction::T ? "T" : "NT"; }
std::string_view to_string(OperatorAction a) { return a == OperatorAction::V ? "V" : "NV"; }

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed-form";
    case Method::GameTree: return "game-tree";
    case Method::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

double effw(double omega, double delta) { return 1.0 + (1.0 - omega) * delta; }

StagePayoffMatrix stage_payoff_matrix(const GameConfig& cfg, const ContractParams& contract,
                                      int stage, double effort, double carried) {
  if (stage != 1 && stage != 2) throw std::invalid_argument("stage index must be 1 or 2");
  check_stage_effort(cfg, effort, "stage_payoff_matrix");

  StagePayoffMatrix m;
  m.stage = stage;
  m.effort = effort;
  m.carried = stage == 2 ? carried : 0.0;

  const double cost = cfg.b * effort;
  const double s = benefit(cfg, effort);

  auto fill = [&](const ContractParams& c, std::array<std::array<PayoffCell, 2>, 2>& table) {
    const double r = reputation(cfg, c, effort);
    // Fresh stage reputation for (T,V), (T,NV), (NT,V), (NT,NV).
    const std::array<double, 4> fresh = {r + c.gamma, r, 0.0, c.h};
    for (int i = 0; i < 4; ++i) {
      const bool truthful = i < 2;
      const bool verified = i % 2 == 0;
      const double pay = stage == 1 ? fresh[i] : (1.0 - c.omega) * m.carried + c.omega * fresh[i];
      PayoffCell& cell = table[truthful ? 0 : 1][verified ? 0 : 1];
      cell.sensor = pay - (truthful ? cost : 0.0);
      cell.op = (truthful ? s : 0.0) - pay - (verified ? cfg.C : 0.0);
    }
  };
  fill(contract, m.offered);
  ContractParams off = contract;
  off.h = 0.0;
  off.gamma = 0.0;
  fill(off, m.withdrawn);
  return m;
}

std::vector<PureProfile> pure_nash(const StagePayoffMatrix& matrix, double tol) {
  auto cell = [&](int s, int o, int offered) -> const PayoffCell& {
    return offered ? matrix.offered[s][o] : matrix.withdrawn[s][o];
  };
  std::vector<PureProfile> out;
  for (int s = 0; s < 2; ++s) {
    for (int o = 0; o < 2; ++o) {
      for (int m = 1; m >= 0; --m) {
        const PayoffCell& here = cell(s, o, m);
        bool stable = cell(1 - s, o, m).sensor - here.sensor <= tol;
        for (int o2 = 0; o2 < 2 && stable; ++o2) {
          for (int m2 = 0; m2 < 2 && stable; ++m2) {
            if (cell(s, o2, m2).op - here.op > tol) stable = false;
          }
        }
        if (!stable) continue;
        const PureProfile p{static_cast<SensorAction>(s), static_cast<OperatorAction>(o), m == 1};
        bool seen = false;
        for (const auto& q : out) seen |= (q.sensor == p.sensor && q.op == p.op);
        if (!seen) out.push_back(p);
      }
    }
  }
  return out;
}

StageMixedStrategy stage2_mixed(const GameConfig& cfg, const ContractParams& contract, double x2) {
  if (contract.omega == 0.0) {
    throw std::domain_error("stage2_mixed: omega must be positive (mixed equilibrium requires omega*h > C)");
  }
  check_stage_effort(cfg, x2, "stage2_mixed");
  return stage_mixed(cfg, contract, 2, contract.omega, x2);
}

StageMixedStrategy stage1_mixed(const GameConfig& cfg, const ContractParams& contract, double x1) {
  if (contract.omega == 0.0) {
    throw std::domain_error("stage1_mixed: omega must be positive (mixed equilibrium requires omega*h > C)");
  }
  check_stage_effort(cfg, x1, "stage1_mixed");
  return stage_mixed(cfg, contract, 1, effw(contract.omega, cfg.delta), x1);
}

EquilibriumProfile mixed_profile(const GameConfig& cfg, const ContractParams& contract,
                                 double x1, double x2) {
  const StageMixedStrategy s1 = stage1_mixed(cfg, contract, x1);
  const StageMixedStrategy s2 = stage2_mixed(cfg, contract, x2);
  EquilibriumProfile prof;
  prof.p1 = s1.p;
  prof.q1 = s1.q;
  prof.p2 = s2.p;
  prof.q2 = s2.q;
  prof.x1 = x1;
  prof.x2 = x2;
  prof.stage1_idle = s1.idle;
  prof.stage2_idle = s2.idle;
  prof.valid = s1.valid && s2.valid;
  prof.diagnostics = s1.diagnostics;
  for (const auto& d : s2.diagnostics) {
    bool dup = false;
    for (const auto& e : prof.diagnostics) dup |= e.name == d.name;
    if (!dup) prof.diagnostics.push_back(d);
  }
  return prof;
}

double sensor_eu(const GameConfig& cfg, const ContractParams& contract, double x1, double x2) {
  check_stage_effort(cfg, x1, "sensor_eu");
  check_stage_effort(cfg, x2, "sensor_eu");
  const bool idle1 = x1 == 0.0;
  const bool idle2 = x2 == 0.0;
  if (idle1 && idle2) return 0.0;

  const double mass = require_positive_mass(contract, "sensor_eu");
  const double h = contract.h;
  const double g = contract.gamma;
  const double w = contract.omega;
  const double d = cfg.delta;
  const double ew = effw(w, d);
  const double k = h / mass;
  const double r1 = reputation(cfg, contract, x1);
  const double r2 = reputation(cfg, contract, x2);

  if (!idle1 && !idle2) {
    return (1.0 + d) * g * h / mass + k * (ew * r1 + w * d * r2 - cfg.b * x1 - d * cfg.b * x2);
  }
  if (idle2) return k * (ew * g + ew * r1 - cfg.b * x1);
  return d * (w * g * h / mass + k * (w * r2 - cfg.b * x2));
}

double operator_eu(const GameConfig& cfg, const ContractParams& contract, double x1, double x2) {
  check_stage_effort(cfg, x1, "operator_eu");
  check_stage_effort(cfg, x2, "operator_eu");
  const bool idle1 = x1 == 0.0;
  const bool idle2 = x2 == 0.0;
  if (idle1 && idle2) return 0.0;

  const double mass = require_positive_mass(contract, "operator_eu");
  if (contract.omega == 0.0) throw std::domain_error("operator_eu: omega must be positive");
  const double h = contract.h;
  const double g = contract.gamma;
  const double w = contract.omega;
  const double d = cfg.delta;
  const double C = cfg.C;
  const double ew = effw(w, d);
  const double q1 = (h - C / ew) / mass;
  const double q2 = (h - C / w) / mass;
  const double surplus1 = benefit(cfg, x1) - ew * reputation(cfg, contract, x1);
  const double surplus2 = benefit(cfg, x2) - w * reputation(cfg, contract, x2);

  if (!idle1 && !idle2) {
    return -(1.0 + d) * (g + C) * h / mass + q1 * surplus1 + d * q2 * surplus2;
  }
  if (idle2) return -h * (C + ew * g) / mass + q1 * surplus1;
  return d * (-h * (w * g + C) / mass + q2 * surplus2);
}

PayoffPair closed_form_payoffs(const GameConfig& cfg, const ContractParams& contract,
                               double x1, double x2) {
  return {sensor_eu(cfg, contract, x1, x2), operator_eu(cfg, contract, x1, x2), Method::ClosedForm};
}

PayoffPair stage2_continuation(const GameConfig& cfg, const ContractParams& contract,
                               double r1, double x2) {
  check_stage_effort(cfg, x2, "stage2_continuation");
  if (!(r1 >= 0.0)) throw std::domain_error("stage2_continuation: carried reputation must be non-negative");
  const double w = contract.omega;
  const double carried = (1.0 - w) * r1;
  if (x2 == 0.0) return {carried, -carried, Method::ClosedForm};

  const double mass = require_positive_mass(contract, "stage2_continuation");
  if (w == 0.0) throw std::domain_error("stage2_continuation: omega must be positive");
  const double h = contract.h;
  const double g = contract.gamma;
  const double r2 = reputation(cfg, contract, x2);
  const double sensor = carried + w * g * h / mass + (h / mass) * (w * r2 - cfg.b * x2);
  const double op = -carried - w * h * (g + cfg.C / w) / mass +
                    (h - cfg.C / w) / mass * (benefit(cfg, x2) - w * r2);
  return {sensor, op, Method::ClosedForm};
}

}  // namespace repcontract
