// Seeded Monte Carlo over the two-stage game. Every random draw is a pure
// function of (seed, episode, stage), so results do not depend on the number
// of threads.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "repcontract/gametree.hpp"
#include "repcontract/model.hpp"

namespace repcontract {

struct SimulationSpec {
  std::uint64_t episodes = 0;
  std::uint64_t seed = 0;
  BehavioralStrategy strategy;
  ContractParams contract;
  GameConfig cfg;
};

struct SimulationResult {
  double mean_sensor = 0.0, mean_operator = 0.0;
  double se_sensor = 0.0, se_operator = 0.0;  // sample stddev / sqrt(episodes)
  double truthful_freq[2] = {0.0, 0.0};       // per stage
  double verified_freq[2] = {0.0, 0.0};
  std::uint64_t episodes = 0;

  bool operator==(const SimulationResult&) const = default;
};

/// Episodes per reduction chunk. Chunks are reduced serially and merged in
/// index order, which fixes the floating-point summation order.
inline constexpr std::uint64_t kChunkEpisodes = 4096;

SimulationResult simulate(const SimulationSpec& spec, int threads = 0);
/// Single-threaded reference; bit-identical to simulate().
SimulationResult simulate_serial(const SimulationSpec& spec);

struct TrajectoryRecord {
  std::uint64_t episode = 0;
  int stage = 1;
  bool truthful = false;
  bool verified = false;
  double effort = 0.0;
  double report = 0.0;
  double reputation = 0.0;  // fresh stage reputation
  double payment = 0.0;
  double u_sensor = 0.0, u_operator = 0.0;  // undiscounted stage utilities
};

/// Records for the first max_episodes episodes, two per episode, using the
/// same draws as simulate().
std::vector<TrajectoryRecord> trajectory_log(const SimulationSpec& spec, std::uint64_t max_episodes);

inline constexpr std::string_view kTrajectoryCsvHeader =
    "episode,stage,truthful,verified,effort,report,reputation,payment,u_sensor,u_operator";
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRecord>& records);

}  // namespace repcontract
