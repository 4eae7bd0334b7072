#include "repcontract/montecarlo.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "repcontract/philox.hpp"

namespace repcontract {

namespace {

struct StageDraw {
  bool truthful;
  bool verified;
};

StageDraw draw(std::uint64_t seed, std::uint64_t episode, int stage, double q, double p) {
  const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const PhiloxCounter ctr{static_cast<std::uint32_t>(episode), static_cast<std::uint32_t>(episode >> 32),
                          static_cast<std::uint32_t>(stage), 0u};
  const PhiloxCounter r = philox4x32_10(ctr, key);
  return {philox_uniform(r[0], r[1]) < q, philox_uniform(r[2], r[3]) < p};
}

// One stage of play: report z_k, fresh reputation, payment and utilities.
TrajectoryRecord play_stage(const SimulationSpec& spec, std::uint64_t episode, int stage,
                            const SensorStagePlan& plan, double verify, double carried) {
  const GameConfig& cfg = spec.cfg;
  const ContractParams& c = spec.contract;
  const StageDraw d = draw(spec.seed, episode, stage, plan.truth_prob, verify);

  TrajectoryRecord rec;
  rec.episode = episode;
  rec.stage = stage;
  rec.truthful = d.truthful;
  rec.verified = d.verified;
  rec.effort = d.truthful ? plan.effort : 0.0;
  // A falsifying sensor exerts no effort and reports x_bar.
  rec.report = d.truthful ? plan.effort : cfg.x_bar;
  // What the operator knows: the true effort when verified, else the report.
  const double z = d.verified ? rec.effort : rec.report;
  rec.reputation = reputation(cfg, c, z) + (d.truthful && d.verified ? c.gamma : 0.0);
  rec.payment = stage == 1 ? rec.reputation : (1.0 - c.omega) * carried + c.omega * rec.reputation;
  rec.u_sensor = rec.payment - cfg.b * rec.effort;
  rec.u_operator = benefit(cfg, rec.effort) - rec.payment - (d.verified ? cfg.C : 0.0);
  return rec;
}

struct EpisodeOutcome {
  TrajectoryRecord s1, s2;
};

EpisodeOutcome play_episode(const SimulationSpec& spec, std::uint64_t episode) {
  const BehavioralStrategy& st = spec.strategy;
  EpisodeOutcome out;
  out.s1 = play_stage(spec, episode, 1, st.sensor1, st.verify1, 0.0);
  const int o1 = (out.s1.truthful ? 0 : 2) + (out.s1.verified ? 0 : 1);
  out.s2 = play_stage(spec, episode, 2, st.sensor2[o1], st.verify2[o1], out.s1.reputation);
  return out;
}

struct Welford {
  double n = 0.0, mean = 0.0, m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const Welford& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * (o.n / total);
    m2 += o.m2 + d * d * (n * o.n / total);
    n = total;
  }
};

struct ChunkStats {
  Welford sensor, op;
  std::uint64_t truthful[2] = {0, 0};
  std::uint64_t verified[2] = {0, 0};

  void merge(const ChunkStats& o) {
    sensor.merge(o.sensor);
    op.merge(o.op);
    for (int k = 0; k < 2; ++k) {
      truthful[k] += o.truthful[k];
      verified[k] += o.verified[k];
    }
  }
};

ChunkStats run_chunk(const SimulationSpec& spec, std::uint64_t begin, std::uint64_t end) {
  ChunkStats s;
  const double delta = spec.cfg.delta;
  for (std::uint64_t e = begin; e < end; ++e) {
    const EpisodeOutcome ep = play_episode(spec, e);
    s.sensor.add(ep.s1.u_sensor + delta * ep.s2.u_sensor);
    s.op.add(ep.s1.u_operator + delta * ep.s2.u_operator);
    s.truthful[0] += ep.s1.truthful;
    s.truthful[1] += ep.s2.truthful;
    s.verified[0] += ep.s1.verified;
    s.verified[1] += ep.s2.verified;
  }
  return s;
}

void check_spec(const SimulationSpec& spec) {
  if (spec.episodes < 1) throw std::invalid_argument("simulate: episodes must be at least 1");
  validate_config(spec.cfg);
  validate_contract(spec.contract);
  validate_strategy(spec.cfg, spec.strategy);
}

SimulationResult finish(const SimulationSpec& spec, const std::vector<ChunkStats>& chunks) {
  ChunkStats all;
  for (const auto& c : chunks) all.merge(c);
  SimulationResult r;
  r.episodes = spec.episodes;
  const double n = static_cast<double>(spec.episodes);
  r.mean_sensor = all.sensor.mean;
  r.mean_operator = all.op.mean;
  if (spec.episodes > 1) {
    r.se_sensor = std::sqrt(all.sensor.m2 / (n - 1.0)) / std::sqrt(n);
    r.se_operator = std::sqrt(all.op.m2 / (n - 1.0)) / std::sqrt(n);
  }
  for (int k = 0; k < 2; ++k) {
    r.truthful_freq[k] = static_cast<double>(all.truthful[k]) / n;
    r.verified_freq[k] = static_cast<double>(all.verified[k]) / n;
  }
  return r;
}

std::uint64_t chunk_count(std::uint64_t episodes) { return (episodes + kChunkEpisodes - 1) / kChunkEpisodes; }

}  // namespace

SimulationResult simulate(const SimulationSpec& spec, int threads) {
  check_spec(spec);
  const std::uint64_t nchunks = chunk_count(spec.episodes);
  std::vector<ChunkStats> chunks(nchunks);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::uint64_t i = 0; i < nchunks; ++i) {
    chunks[i] = run_chunk(spec, i * kChunkEpisodes, std::min(spec.episodes, (i + 1) * kChunkEpisodes));
  }
  return finish(spec, chunks);
}

SimulationResult simulate_serial(const SimulationSpec& spec) {
  check_spec(spec);
  const std::uint64_t nchunks = chunk_count(spec.episodes);
  std::vector<ChunkStats> chunks;
  chunks.reserve(nchunks);
  for (std::uint64_t i = 0; i < nchunks; ++i) {
    chunks.push_back(run_chunk(spec, i * kChunkEpisodes, std::min(spec.episodes, (i + 1) * kChunkEpisodes)));
  }
  return finish(spec, chunks);
}

std::vector<TrajectoryRecord> trajectory_log(const SimulationSpec& spec, std::uint64_t max_episodes) {
  check_spec(spec);
  if (max_episodes > spec.episodes) throw std::invalid_argument("trajectory_log: max_episodes exceeds episodes");
  std::vector<TrajectoryRecord> out;
  out.reserve(2 * max_episodes);
  for (std::uint64_t e = 0; e < max_episodes; ++e) {
    const EpisodeOutcome ep = play_episode(spec, e);
    out.push_back(ep.s1);
    out.push_back(ep.s2);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRecord>& records) {
  os << kTrajectoryCsvHeader << '\n';
  char buf[320];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%llu,%d,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  static_cast<unsigned long long>(r.episode), r.stage, r.truthful ? 1 : 0, r.verified ? 1 : 0,
                  r.effort, r.report, r.reputation, r.payment, r.u_sensor, r.u_operator);
    os << buf;
  }
}

}  // namespace repcontract
