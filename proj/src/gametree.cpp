#include "repcontract/gametree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace repcontract {

namespace {

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

// Probabilities coming from closed forms may sit one ulp outside [0, 1].
double tidy(double p) { return std::clamp(p, 0.0, 1.0); }

double outcome_prob(StageOutcome o, double q, double p) {
  const double pt = truthful(o) ? q : 1.0 - q;
  const double pv = verified(o) ? p : 1.0 - p;
  return pt * pv;
}

// Fresh stage reputation per the stage payoff table.
double fresh_reputation(const GameConfig& cfg, const ContractParams& c, StageOutcome o, double effort) {
  switch (o) {
    case StageOutcome::TruthfulVerified: return reputation(cfg, c, effort) + c.gamma;
    case StageOutcome::TruthfulUnverified: return reputation(cfg, c, effort);
    case StageOutcome::FalseVerified: return reputation(cfg, c, 0.0);
    case StageOutcome::FalseUnverified: return reputation(cfg, c, cfg.x_bar);
  }
  return 0.0;
}

PayoffCell stage_utilities(const GameConfig& cfg, StageOutcome o, double effort, double payment) {
  const double e = truthful(o) ? effort : 0.0;
  return {payment - cfg.b * e, benefit(cfg, e) - payment - (verified(o) ? cfg.C : 0.0)};
}

std::vector<SensorStagePlan> sensor_candidates(std::span<const double> grid) {
  std::vector<SensorStagePlan> out;
  out.reserve(grid.size() + 1);
  for (double e : grid) out.push_back({e, 1.0});
  out.push_back({0.0, 0.0});
  return out;
}

std::string describe(const SensorStagePlan& s) {
  if (s.truth_prob == 0.0) return "NT";
  if (s.truth_prob == 1.0) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "T@%.6g", s.effort);
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "mix(q=%.6g,x=%.6g)", s.truth_prob, s.effort);
  return buf;
}

std::string describe_verify(double p) { return p == 1.0 ? "V" : (p == 0.0 ? "NV" : "mix"); }

// Describes stage-2 choices over the stage-1 outcomes that are reached.
template <typename T, typename F>
std::string describe_stage2(const BehavioralStrategy& s, const std::array<T, kOutcomes>& plan, F&& fmt) {
  std::vector<std::pair<int, std::string>> reached;
  for (int o = 0; o < kOutcomes; ++o) {
    if (outcome_prob(static_cast<StageOutcome>(o), tidy(s.sensor1.truth_prob), tidy(s.verify1)) > 0.0) {
      reached.emplace_back(o, fmt(plan[o]));
    }
  }
  if (reached.empty()) return "none";
  bool same = true;
  for (const auto& r : reached) same &= r.second == reached.front().second;
  if (same) return reached.front().second;
  std::string out;
  for (const auto& [o, d] : reached) {
    if (!out.empty()) out += ",";
    out += std::string(to_string(static_cast<StageOutcome>(o))) + ":" + d;
  }
  return out;
}

// Separable per-outcome maximization of the sensor's stage-2 choices.
void best_stage2(const GameConfig& cfg, const ContractParams& contract, BehavioralStrategy& s,
                 const std::vector<SensorStagePlan>& cands) {
  for (int o = 0; o < kOutcomes; ++o) {
    double best = -INFINITY;
    SensorStagePlan pick = cands.front();
    for (const auto& c : cands) {
      s.sensor2[o] = c;
      const double v = exact_payoffs(cfg, contract, s).sensor;
      if (v > best) {
        best = v;
        pick = c;
      }
    }
    s.sensor2[o] = pick;
  }
}

}  // namespace

std::string_view to_string(StageOutcome o) {
  switch (o) {
    case StageOutcome::TruthfulVerified: return "TV";
    case StageOutcome::TruthfulUnverified: return "TNV";
    case StageOutcome::FalseVerified: return "NTV";
    case StageOutcome::FalseUnverified: return "NTNV";
  }
  return "?";
}

BehavioralStrategy BehavioralStrategy::stationary(SensorStagePlan s1, double p1, SensorStagePlan s2, double p2) {
  BehavioralStrategy s;
  s.sensor1 = s1;
  s.verify1 = p1;
  s.sensor2.fill(s2);
  s.verify2.fill(p2);
  return s;
}

BehavioralStrategy BehavioralStrategy::from_profile(const EquilibriumProfile& profile) {
  const SensorStagePlan s1 = profile.stage1_idle ? SensorStagePlan{0.0, 1.0} : SensorStagePlan{profile.x1, tidy(profile.q1)};
  const SensorStagePlan s2 = profile.stage2_idle ? SensorStagePlan{0.0, 1.0} : SensorStagePlan{profile.x2, tidy(profile.q2)};
  const double p1 = profile.stage1_idle ? 0.0 : tidy(profile.p1);
  const double p2 = profile.stage2_idle ? 0.0 : tidy(profile.p2);
  return stationary(s1, p1, s2, p2);
}

void validate_strategy(const GameConfig& cfg, const BehavioralStrategy& strat) {
  auto check = [&](const SensorStagePlan& s) {
    if (!(s.effort >= 0.0 && s.effort <= cfg.x_bar)) throw std::invalid_argument("strategy effort outside [0, x_bar]");
    if (!is_prob(s.truth_prob)) throw std::invalid_argument("strategy truth probability outside [0, 1]");
  };
  check(strat.sensor1);
  for (const auto& s : strat.sensor2) check(s);
  if (!is_prob(strat.verify1)) throw std::invalid_argument("strategy verification probability outside [0, 1]");
  for (double p : strat.verify2) {
    if (!is_prob(p)) throw std::invalid_argument("strategy verification probability outside [0, 1]");
  }
}

std::vector<OutcomePath> enumerate_paths(const GameConfig& cfg, const ContractParams& contract,
                                         const BehavioralStrategy& strat) {
  validate_strategy(cfg, strat);
  const double w = contract.omega;
  std::vector<OutcomePath> paths;
  paths.reserve(kOutcomes * kOutcomes);
  for (int i = 0; i < kOutcomes; ++i) {
    const auto o1 = static_cast<StageOutcome>(i);
    const double pr1 = outcome_prob(o1, strat.sensor1.truth_prob, strat.verify1);
    const double r1 = fresh_reputation(cfg, contract, o1, strat.sensor1.effort);
    const PayoffCell u1 = stage_utilities(cfg, o1, strat.sensor1.effort, r1);
    const SensorStagePlan& s2 = strat.sensor2[i];
    for (int j = 0; j < kOutcomes; ++j) {
      const auto o2 = static_cast<StageOutcome>(j);
      OutcomePath path;
      path.first = o1;
      path.second = o2;
      path.effort1 = truthful(o1) ? strat.sensor1.effort : 0.0;
      path.effort2 = truthful(o2) ? s2.effort : 0.0;
      path.carried = r1;
      path.payment1 = r1;
      path.payment2 = (1.0 - w) * r1 + w * fresh_reputation(cfg, contract, o2, s2.effort);
      path.stage1 = u1;
      path.stage2 = stage_utilities(cfg, o2, s2.effort, path.payment2);
      path.probability = pr1 * outcome_prob(o2, s2.truth_prob, strat.verify2[i]);
      paths.push_back(path);
    }
  }
  return paths;
}

PayoffPair exact_payoffs(const GameConfig& cfg, const ContractParams& contract,
                         const BehavioralStrategy& strat) {
  PayoffPair out{0.0, 0.0, Method::GameTree};
  for (const auto& path : enumerate_paths(cfg, contract, strat)) {
    out.sensor += path.probability * (path.stage1.sensor + cfg.delta * path.stage2.sensor);
    out.op += path.probability * (path.stage1.op + cfg.delta * path.stage2.op);
  }
  return out;
}

BestResponse sensor_best_response(const GameConfig& cfg, const ContractParams& contract,
                                  const OperatorPlan& op, std::span<const double> effort_grid) {
  if (effort_grid.empty()) throw std::invalid_argument("sensor_best_response: empty effort grid");
  const auto cands = sensor_candidates(effort_grid);
  BestResponse best;
  best.value = -INFINITY;
  for (const auto& a1 : cands) {
    BehavioralStrategy s;
    s.sensor1 = a1;
    s.verify1 = op.verify1;
    s.verify2 = op.verify2;
    s.sensor2.fill(cands.front());
    best_stage2(cfg, contract, s, cands);
    const double v = exact_payoffs(cfg, contract, s).sensor;
    if (v > best.value) {
      best.value = v;
      best.strategy = s;
    }
  }
  return best;
}

const Deviation& DeviationReport::worst() const {
  if (deviations.empty()) throw std::logic_error("DeviationReport::worst on empty report");
  return *std::max_element(deviations.begin(), deviations.end(),
                           [](const Deviation& a, const Deviation& b) { return a.gain < b.gain; });
}

DeviationReport check_equilibrium(const GameConfig& cfg, const ContractParams& contract,
                                  const EquilibriumProfile& profile,
                                  std::span<const double> effort_grid, double tol) {
  if (effort_grid.empty()) throw std::invalid_argument("check_equilibrium: empty effort grid");
  const BehavioralStrategy base = BehavioralStrategy::from_profile(profile);
  const PayoffPair v0 = exact_payoffs(cfg, contract, base);
  const auto cands = sensor_candidates(effort_grid);

  DeviationReport rep;
  rep.tolerance = tol;

  // Sensor, stage 1 only.
  {
    Deviation d{"sensor", 1, "", -INFINITY};
    for (const auto& a1 : cands) {
      BehavioralStrategy s = base;
      s.sensor1 = a1;
      const double gain = exact_payoffs(cfg, contract, s).sensor - v0.sensor;
      if (gain > d.gain) {
        d.gain = gain;
        d.action = describe(a1);
      }
    }
    rep.deviations.push_back(d);
  }
  // Sensor, stage 2 only.
  {
    BehavioralStrategy s = base;
    best_stage2(cfg, contract, s, cands);
    const double gain = exact_payoffs(cfg, contract, s).sensor - v0.sensor;
    rep.deviations.push_back({"sensor", 2, describe_stage2(s, s.sensor2, describe), gain});
  }
  // Sensor, both stages.
  {
    const BestResponse br = sensor_best_response(cfg, contract, {base.verify1, base.verify2}, effort_grid);
    const std::string action = describe(br.strategy.sensor1) + " then " +
                               describe_stage2(br.strategy, br.strategy.sensor2, describe);
    rep.deviations.push_back({"sensor", 0, action, br.value - v0.sensor});
  }
  // Operator: stage 1 alone, stage 2 alone (conditioned on the stage-1
  // outcome), and jointly.
  {
    Deviation d1{"operator", 1, "", -INFINITY};
    Deviation d2{"operator", 2, "", -INFINITY};
    Deviation dj{"operator", 0, "", -INFINITY};
    for (int m1 = -1; m1 < 2; ++m1) {  // -1 keeps the profile's stage-1 play
      for (int mask = -1; mask < (1 << kOutcomes); ++mask) {  // -1 keeps stage-2 play
        if (m1 == -1 && mask == -1) continue;
        BehavioralStrategy s = base;
        if (m1 >= 0) s.verify1 = m1;
        if (mask >= 0) {
          for (int o = 0; o < kOutcomes; ++o) s.verify2[o] = (mask >> o) & 1;
        }
        const double gain = exact_payoffs(cfg, contract, s).op - v0.op;
        Deviation& d = m1 == -1 ? d2 : (mask == -1 ? d1 : dj);
        if (gain > d.gain) {
          d.gain = gain;
          if (&d == &d1) {
            d.action = describe_verify(s.verify1);
          } else if (&d == &d2) {
            d.action = describe_stage2(s, s.verify2, describe_verify);
          } else {
            d.action = describe_verify(s.verify1) + " then " + describe_stage2(s, s.verify2, describe_verify);
          }
        }
      }
    }
    rep.deviations.push_back(d1);
    rep.deviations.push_back(d2);
    rep.deviations.push_back(dj);
  }

  for (const auto& d : rep.deviations) {
    double& g = d.player == "sensor" ? rep.sensor_gain : rep.operator_gain;
    g = std::max(g, d.gain);
  }
  rep.max_gain = std::max({0.0, rep.sensor_gain, rep.operator_gain});
  rep.certified = rep.max_gain <= tol;
  return rep;
}

double IndifferenceGaps::max() const {
  double m = 0.0;
  if (!stage1_degenerate) m = std::max({m, sensor1, operator1});
  if (!stage2_degenerate) m = std::max({m, sensor2, operator2});
  return m;
}

IndifferenceGaps indifference_gaps(const GameConfig& cfg, const ContractParams& contract,
                                   const EquilibriumProfile& profile) {
  const BehavioralStrategy base = BehavioralStrategy::from_profile(profile);
  IndifferenceGaps g;
  g.stage1_degenerate = profile.stage1_idle;
  g.stage2_degenerate = profile.stage2_idle;

  auto sensor_val = [&](const BehavioralStrategy& s) { return exact_payoffs(cfg, contract, s).sensor; };
  auto op_val = [&](const BehavioralStrategy& s) { return exact_payoffs(cfg, contract, s).op; };

  BehavioralStrategy t = base, nt = base;
  t.sensor1 = {base.sensor1.effort, 1.0};
  nt.sensor1 = {base.sensor1.effort, 0.0};
  g.sensor1 = std::abs(sensor_val(t) - sensor_val(nt));

  t = base;
  nt = base;
  t.sensor2.fill({base.sensor2[0].effort, 1.0});
  nt.sensor2.fill({base.sensor2[0].effort, 0.0});
  g.sensor2 = std::abs(sensor_val(t) - sensor_val(nt));

  BehavioralStrategy v = base, nv = base;
  v.verify1 = 1.0;
  nv.verify1 = 0.0;
  g.operator1 = std::abs(op_val(v) - op_val(nv));

  v = base;
  nv = base;
  v.verify2.fill(1.0);
  nv.verify2.fill(0.0);
  g.operator2 = std::abs(op_val(v) - op_val(nv));
  return g;
}

std::vector<double> default_effort_grid(const GameConfig& cfg, int n) {
  if (n < 2) throw std::invalid_argument("effort grid needs at least 2 points");
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (int i = 0; i < n; ++i) grid.push_back(i == n - 1 ? cfg.x_bar : cfg.x_bar * i / (n - 1));
  grid.push_back(effort_star(cfg));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace repcontract
