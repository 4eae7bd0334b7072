#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "repcontract/montecarlo.hpp"
#include "repcontract/philox.hpp"

using namespace repcontract;
using doctest::Approx;

namespace {

SimulationSpec reference_spec(std::uint64_t episodes, std::uint64_t seed) {
  const GameConfig cfg = oracle::reference_cfg();
  const OptimalContract oc = optimal_contract_given_omega(cfg, 0.5);
  return {episodes, seed, BehavioralStrategy::from_profile(oc.profile), oc.contract, cfg};
}

bool within(double freq, double p, std::uint64_t n) {
  return std::abs(freq - p) <= 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)) + 1e-15;
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A = PhiloxCounter;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  CHECK(philox_uniform(0, 0) == 0.0);
  CHECK(philox_uniform(0xffffffffu, 0xffffffffu) < 1.0);
}

TEST_CASE("deterministic strategy has no sampling error") {
  const GameConfig cfg = oracle::reference_cfg();
  const ContractParams c{4.0, 0.3, 0.5, 0.0};
  const BehavioralStrategy s = BehavioralStrategy::stationary({1.0, 1.0}, 1.0, {0.25, 1.0}, 1.0);
  const SimulationSpec spec{5000, 9, s, c, cfg};
  const SimulationResult r = simulate(spec);
  const PayoffPair exact = exact_payoffs(cfg, c, s);
  CHECK(r.se_sensor == 0.0);
  CHECK(r.se_operator == 0.0);
  CHECK(r.mean_sensor == exact.sensor);
  CHECK(r.mean_operator == exact.op);
  CHECK(r.truthful_freq[0] == 1.0);
  CHECK(r.verified_freq[1] == 1.0);
}

TEST_CASE("one deterministic episode logs the hand-computed path") {
  const GameConfig cfg = oracle::reference_cfg();
  const ContractParams c{4.0, 0.0, 0.5, 0.0};
  // Stage 1: truthful at x_bar, unverified. Stage 2: falsify, unverified.
  const BehavioralStrategy s = BehavioralStrategy::stationary({1.0, 1.0}, 0.0, {0.25, 0.0}, 0.0);
  const auto log = trajectory_log({1, 3, s, c, cfg}, 1);
  REQUIRE(log.size() == 2);
  CHECK(log[0].stage == 1);
  CHECK(log[0].truthful);
  CHECK_FALSE(log[0].verified);
  CHECK(log[0].report == 1.0);
  CHECK(log[0].payment == 4.0);
  CHECK(log[0].u_sensor == 2.0);
  CHECK(log[0].u_operator == Approx(2.0 - 4.0));
  CHECK(log[1].stage == 2);
  CHECK_FALSE(log[1].truthful);
  CHECK(log[1].effort == 0.0);
  CHECK(log[1].report == 1.0);
  CHECK(log[1].reputation == 4.0);
  CHECK(log[1].payment == 4.0);  // 0.5 * 4 carried + 0.5 * 4 fresh
  CHECK(log[1].u_operator == -4.0);

  std::ostringstream os;
  write_trajectory_csv(os, log);
  CHECK(os.str() ==
        "episode,stage,truthful,verified,effort,report,reputation,payment,u_sensor,u_operator\n"
        "0,1,1,0,1,1,4,4,2,-2\n"
        "0,2,0,0,0,1,4,4,4,-4\n");
  CHECK_THROWS_AS(trajectory_log({1, 3, s, c, cfg}, 2), std::invalid_argument);
}

TEST_CASE("caught falsification resets reputation to zero") {
  const GameConfig cfg = oracle::reference_cfg();
  const ContractParams c{4.0, 0.0, 0.5, 0.0};
  const BehavioralStrategy s = BehavioralStrategy::stationary({1.0, 0.0}, 1.0, {0.25, 1.0}, 1.0);
  const auto log = trajectory_log({1, 3, s, c, cfg}, 1);
  CHECK(log[0].reputation == 0.0);
  CHECK(log[0].u_operator == Approx(-0.2));
  CHECK(log[1].payment == 0.5);  // carried 0, fresh R(0.25) = 1
}

TEST_CASE("reference simulation converges to the oracle values") {
  const SimulationSpec spec = reference_spec(100000, 42);
  const SimulationResult r = simulate(spec);
  CHECK(r.episodes == 100000);
  CHECK(std::abs(r.mean_sensor - 3.8) <= 3.0 * r.se_sensor);
  CHECK(std::abs(r.mean_operator - (-3.643966)) <= 3.0 * r.se_operator);
  const auto& st = spec.strategy;
  CHECK(within(r.verified_freq[0], st.verify1, r.episodes));
  CHECK(within(r.truthful_freq[0], st.sensor1.truth_prob, r.episodes));
  CHECK(within(r.verified_freq[1], st.verify2[0], r.episodes));
  CHECK(within(r.truthful_freq[1], st.sensor2[0].truth_prob, r.episodes));
}

TEST_CASE("standard errors are sample stddev over sqrt(n)") {
  const SimulationSpec spec = reference_spec(3000, 5);
  const SimulationResult r = simulate(spec);
  const auto log = trajectory_log(spec, 3000);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < log.size(); i += 2) {
    const double v = log[i].u_sensor + spec.cfg.delta * log[i + 1].u_sensor;
    sum += v;
    sum2 += v * v;
  }
  const double n = 3000.0, mean = sum / n;
  CHECK(r.mean_sensor == Approx(mean).epsilon(1e-12));
  CHECK(r.se_sensor == Approx(std::sqrt((sum2 - n * mean * mean) / (n - 1)) / std::sqrt(n)).epsilon(1e-9));
}

TEST_CASE("reruns and thread counts give bit-identical results") {
  const SimulationSpec spec = reference_spec(50000, 42);
  const SimulationResult a = simulate(spec, 1);
  CHECK(a == simulate(spec, 1));
  CHECK(a == simulate(spec, 3));
  CHECK(a == simulate(spec, 8));
  CHECK(a == simulate_serial(spec));
  CHECK_FALSE(a == simulate(reference_spec(50000, 43)));
}

TEST_CASE("three-SE coverage across seeds") {
  const GameConfig cfg = oracle::reference_cfg();
  const OptimalContract oc = optimal_contract_given_omega(cfg, 0.5);
  const BehavioralStrategy st = BehavioralStrategy::from_profile(oc.profile);
  const PayoffPair exact = exact_payoffs(cfg, oc.contract, st);
  int sensor_hits = 0, op_hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const SimulationResult r = simulate({10000, seed, st, oc.contract, cfg});
    sensor_hits += std::abs(r.mean_sensor - exact.sensor) <= 3.0 * r.se_sensor;
    op_hits += std::abs(r.mean_operator - exact.op) <= 3.0 * r.se_operator;
  }
  CHECK(sensor_hits >= 99);
  CHECK(op_hits >= 99);
}

TEST_CASE("simulation input checks") {
  SimulationSpec spec = reference_spec(0, 1);
  CHECK_THROWS_AS(simulate(spec), std::invalid_argument);
  spec.episodes = 10;
  spec.strategy.verify1 = 2.0;
  CHECK_THROWS_AS(simulate(spec), std::invalid_argument);
}
