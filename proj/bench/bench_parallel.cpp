// Serial vs OpenMP timings for the two parallel kernels. Also checks that
// both paths agree bit for bit.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "repcontract/design.hpp"
#include "repcontract/montecarlo.hpp"

using namespace repcontract;

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int main(int argc, char** argv) {
  const std::uint64_t episodes = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000000;
  GameConfig cfg{2.0, 1.0, 0.2, 0.9, {BenefitFamily::Power, 2.0, 0.5}};
  const OptimalContract oc = optimal_contract_given_omega(cfg, 0.5);

  SimulationSpec spec{episodes, 42, BehavioralStrategy::from_profile(oc.profile), oc.contract, cfg};
  SimulationResult rs, rp;
  const double ts = seconds([&] { rs = simulate_serial(spec); });
  const double tp = seconds([&] { rp = simulate(spec); });
  std::printf("threads %d\n", omp_get_max_threads());
  std::printf("simulate     %llu episodes  serial %.3fs  openmp %.3fs  speedup %.2fx  identical %s\n",
              static_cast<unsigned long long>(episodes), ts, tp, ts / tp, rs == rp ? "yes" : "NO");

  ContractGrid grid;
  for (int i = 0; i <= 40; ++i) grid.h.push_back(0.1 * i);
  for (int i = 0; i <= 4; ++i) grid.gamma.push_back(0.25 * i);
  for (int i = 1; i <= 20; ++i) grid.omega.push_back(i / 20.0);
  grid.effort = default_effort_grid(cfg, 21);
  GridSearchResult gs, gp;
  const double gts = seconds([&] { gs = grid_search_contract_serial(cfg, grid); });
  const double gtp = seconds([&] { gp = grid_search_contract(cfg, grid); });
  const bool same = gs.value == gp.value && gs.best.contract.h == gp.best.contract.h &&
                    gs.best.contract.gamma == gp.best.contract.gamma && gs.best.contract.omega == gp.best.contract.omega;
  std::printf("grid search  %zu points      serial %.3fs  openmp %.3fs  speedup %.2fx  identical %s\n",
              gs.lattice_points, gts, gtp, gts / gtp, same ? "yes" : "NO");
  return rs == rp && same ? 0 : 1;
}
