#include <doctest.h>

#include "oracles.hpp"

using namespace repcontract;
using doctest::Approx;

namespace {

const ContractParams kOptimalHalf{4.0, 0.0, 0.5, 0.0};

EquilibriumProfile optimal_profile(double omega) {
  return optimal_contract_given_omega(oracle::reference_cfg(), omega).profile;
}

}  // namespace

TEST_CASE("sixteen paths with probabilities summing to one") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    const oracle::Instance s = oracle::random_valid_instance(rng);
    const auto paths = enumerate_paths(s.cfg, s.contract, BehavioralStrategy::from_profile(s.profile));
    REQUIRE(paths.size() == 16);
    double total = 0.0;
    for (const auto& p : paths) {
      CHECK(p.probability >= 0.0);
      total += p.probability;
    }
    CHECK(total == Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("path payments follow the reputation transitions") {
  const GameConfig cfg = oracle::reference_cfg();
  const auto paths = enumerate_paths(cfg, kOptimalHalf, BehavioralStrategy::from_profile(optimal_profile(0.5)));
  for (const auto& p : paths) {
    const double r1 = p.first == StageOutcome::TruthfulVerified || p.first == StageOutcome::TruthfulUnverified ? 4.0
                      : p.first == StageOutcome::FalseVerified                                                 ? 0.0
                                                                                                               : 4.0;
    CHECK(p.payment1 == Approx(r1));
    double fresh2 = 0.0;
    switch (p.second) {
      case StageOutcome::TruthfulVerified:
      case StageOutcome::TruthfulUnverified: fresh2 = 1.0; break;
      case StageOutcome::FalseVerified: fresh2 = 0.0; break;
      case StageOutcome::FalseUnverified: fresh2 = 4.0; break;
    }
    CHECK(p.payment2 == Approx(0.5 * r1 + 0.5 * fresh2));
  }
  CHECK(to_string(StageOutcome::FalseUnverified) == "NTNV");
}

TEST_CASE("closed-form utilities match the game tree") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 500; ++i) {
    const oracle::Instance s = oracle::random_valid_instance(rng);
    const PayoffPair tree = exact_payoffs(s.cfg, s.contract, BehavioralStrategy::from_profile(s.profile));
    CHECK(tree.method == Method::GameTree);
    CHECK(std::abs(sensor_eu(s.cfg, s.contract, s.x1, s.x2) - tree.sensor) <= 1e-9);
    CHECK(std::abs(operator_eu(s.cfg, s.contract, s.x1, s.x2) - tree.op) <= 1e-9);
  }
}

TEST_CASE("indifference gaps vanish on valid profiles") {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 500; ++i) {
    const oracle::Instance s = oracle::random_valid_instance(rng);
    const IndifferenceGaps g = indifference_gaps(s.cfg, s.contract, s.profile);
    CHECK(g.max() <= 1e-9);
    CHECK(g.stage1_degenerate == (s.x1 == 0.0));
    CHECK(g.stage2_degenerate == (s.x2 == 0.0));
  }
}

TEST_CASE("reference equilibrium is certified") {
  const GameConfig cfg = oracle::reference_cfg();
  const auto grid = default_effort_grid(cfg, 51);
  for (double omega : {0.25, 0.5, 0.75, 1.0}) {
    const OptimalContract oc = optimal_contract_given_omega(cfg, omega);
    const DeviationReport rep = check_equilibrium(cfg, oc.contract, oc.profile, grid);
    CAPTURE(omega);
    CHECK(rep.certified);
    CHECK(rep.max_gain <= 1e-9);
    CHECK(rep.deviations.size() == 6);
  }
}

TEST_CASE("a perturbed stage-2 verification rate is caught") {
  const GameConfig cfg = oracle::reference_cfg();
  EquilibriumProfile prof = optimal_profile(0.5);
  prof.p2 = 0.9;
  const DeviationReport rep = check_equilibrium(cfg, kOptimalHalf, prof, default_effort_grid(cfg, 51));
  CHECK_FALSE(rep.certified);
  const Deviation& w = rep.worst();
  CHECK(w.player == "sensor");
  // T at x* nets 0 at stage 2; NT nets omega h (1 - p2) = 0.2. Switching
  // from q2 = 0.9 to pure NT gains delta * q2 * 0.2.
  CHECK(rep.sensor_gain == Approx(0.162).epsilon(1e-9));
  bool stage2_nt = false;
  for (const auto& d : rep.deviations) stage2_nt |= d.player == "sensor" && d.stage == 2 && d.action == "NT";
  CHECK(stage2_nt);
}

TEST_CASE("sensor_best_response agrees with brute-force plan enumeration") {
  // Every pure plan on a 4-point grid: 5 stage-1 choices x 5^4 outcome-conditioned stage-2 choices.
  const GameConfig cfg = oracle::reference_cfg();
  const std::vector<double> grid = {0.0, 0.25, 0.6, 1.0};
  std::vector<SensorStagePlan> cands;
  for (double e : grid) cands.push_back({e, 1.0});
  cands.push_back({0.0, 0.0});

  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const OperatorPlan op{u(rng), {u(rng), u(rng), u(rng), u(rng)}};
    const ContractParams c{1.0 + 4.0 * u(rng), u(rng), 0.2 + 0.8 * u(rng), 0.0};
    double best = -INFINITY;
    BehavioralStrategy s;
    s.verify1 = op.verify1;
    s.verify2 = op.verify2;
    for (const auto& a : cands) {
      s.sensor1 = a;
      for (int idx = 0; idx < 625; ++idx) {
        int k = idx;
        for (int o = 0; o < 4; ++o, k /= 5) s.sensor2[o] = cands[k % 5];
        best = std::max(best, exact_payoffs(cfg, c, s).sensor);
      }
    }
    const BestResponse br = sensor_best_response(cfg, c, op, grid);
    CHECK(br.value == Approx(best).epsilon(1e-12));
    CHECK(exact_payoffs(cfg, c, br.strategy).sensor == Approx(br.value).epsilon(1e-14));
  }
}

TEST_CASE("strategy validation") {
  const GameConfig cfg = oracle::reference_cfg();
  BehavioralStrategy s = BehavioralStrategy::stationary({0.5, 1.0}, 0.5, {0.5, 1.0}, 0.5);
  CHECK_NOTHROW(validate_strategy(cfg, s));
  s.verify2[3] = 1.2;
  CHECK_THROWS_AS(validate_strategy(cfg, s), std::invalid_argument);
  s = BehavioralStrategy::stationary({1.5, 1.0}, 0.5, {0.5, 1.0}, 0.5);
  CHECK_THROWS_AS(exact_payoffs(cfg, kOptimalHalf, s), std::invalid_argument);
}

TEST_CASE("idle stages map to effort 0, truthful, not verified") {
  const GameConfig cfg = oracle::reference_cfg();
  const EquilibriumProfile prof = mixed_profile(cfg, kOptimalHalf, 1.0, 0.0);
  const BehavioralStrategy s = BehavioralStrategy::from_profile(prof);
  for (int o = 0; o < kOutcomes; ++o) {
    CHECK(s.verify2[o] == 0.0);
    CHECK(s.sensor2[o].effort == 0.0);
  }
}

TEST_CASE("default effort grid") {
  const GameConfig cfg = oracle::reference_cfg();
  const auto g = default_effort_grid(cfg, 51);
  CHECK(g.size() == 52);  // 51 points plus x* = 0.25
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(std::is_sorted(g.begin(), g.end()));
  const auto g4 = default_effort_grid(cfg, 4);
  CHECK(g4.size() == 5);
  CHECK(std::count(g4.begin(), g4.end(), 0.25) == 1);
}
