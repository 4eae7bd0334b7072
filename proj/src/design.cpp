#include "repcontract/design.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "repcontract/gametree.hpp"

namespace repcontract {

namespace {

constexpr double kBoundaryTol = 1e-12;

void require_omega(double omega, const char* who) {
  if (!(omega > 0.0 && omega <= 1.0)) {
    throw std::domain_error(std::string(who) + ": omega must lie in (0, 1]");
  }
}

// Participation holds up to rounding: the sensor's value at the optimum is
// exactly 0 in closed form but evaluates to about -1e-17.
bool nonnegative(double v, double scale) { return v >= -1e-12 * std::max(1.0, scale); }

bool near(double a, double b) { return std::abs(a - b) <= kBoundaryTol * std::max(1.0, std::abs(b)); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

OptimalContract from_lattice(const GameConfig& cfg, const LatticePoint& pt) {
  OptimalContract out;
  out.contract = pt.contract;
  out.x1 = pt.x1;
  out.x2 = pt.x2;
  out.operator_value = pt.operator_value;
  out.sensor_value = pt.sensor_value;
  out.regime_ok = validate_config(cfg).regime_ok;
  out.ir_ok = pt.participates && nonnegative(pt.operator_value, pt.contract.h);
  if (pt.contract.omega > 0.0) {
    out.profile = mixed_profile(cfg, pt.contract, pt.x1, pt.x2);
    out.objective_value = omega_objective(cfg, pt.contract.omega);
    out.case_label = case_analysis(cfg, pt.contract.omega, pt.contract.h);
  }
  return out;
}

GridSearchResult finish_search(const GameConfig& cfg, const ContractGrid& grid,
                               const std::vector<LatticePoint>& points) {
  GridSearchResult res;
  res.lattice_points = points.size();
  const LatticePoint* best = nullptr;
  for (const auto& pt : points) {  // lexicographic (h, gamma, omega) order
    if (!pt.participates) continue;
    if (best == nullptr || pt.operator_value > best->operator_value) best = &pt;
  }
  if (best == nullptr) {
    LatticePoint outside;
    outside.contract = {0.0, 0.0, grid.omega.empty() ? 1.0 : grid.omega.back(), 0.0};
    res.best = from_lattice(cfg, outside);
    res.outside_option = true;
    res.value = 0.0;
    return res;
  }
  res.best = from_lattice(cfg, *best);
  res.outside_option = !(best->operator_value > 0.0);
  res.value = res.outside_option ? 0.0 : best->operator_value;
  return res;
}

void check_grid(const ContractGrid& grid) {
  if (grid.h.empty() || grid.gamma.empty() || grid.omega.empty() || grid.effort.empty()) {
    throw std::invalid_argument("grid_search_contract: empty grid");
  }
}

}  // namespace

std::string_view to_string(Case c) {
  switch (c) {
    case Case::I: return "I";
    case Case::II: return "II";
    case Case::III: return "III";
    case Case::IV: return "IV";
    case Case::V: return "V";
  }
  return "?";
}

CaseLabel case_analysis(const GameConfig& cfg, double omega, double h) {
  require_omega(omega, "case_analysis");
  if (!(h >= 0.0)) throw std::domain_error("case_analysis: h must be non-negative");
  const double bx = cfg.b * cfg.x_bar;
  const double xs = effort_star(cfg);

  CaseLabel c;
  c.lower = bx / effw(omega, cfg.delta);
  c.upper = bx / omega;

  if (near(h, c.upper)) {
    // At omega = 1 the Case II and IV boundaries coincide and the sensor is
    // indifferent at both stages.
    c.label = Case::IV;
    c.x1 = omega == 1.0 ? xs : cfg.x_bar;
    c.x2 = xs;
    c.h_range = "h = b*x_bar/omega";
  } else if (near(h, c.lower)) {
    c.label = Case::II;
    c.x1 = xs;
    c.x2 = 0.0;
    c.h_range = "h = b*x_bar/effw";
  } else if (h < c.lower) {
    c.label = Case::I;
    c.h_range = "h < b*x_bar/effw";
  } else if (h < c.upper) {
    c.label = Case::III;
    c.x1 = cfg.x_bar;
    c.x2 = 0.0;
    c.h_range = "b*x_bar/effw < h < b*x_bar/omega";
  } else {
    c.label = Case::V;
    c.x1 = cfg.x_bar;
    c.x2 = cfg.x_bar;
    c.h_range = "h > b*x_bar/omega";
  }

  const ContractParams contract{h, 0.0, omega, 0.0};
  const EquilibriumProfile prof = mixed_profile(cfg, contract, c.x1, c.x2);
  c.profile_valid = prof.valid;
  c.operator_value = prof.valid ? operator_eu(cfg, contract, c.x1, c.x2) : 0.0;
  return c;
}

double case_value_derivative(const GameConfig& cfg, double omega, double h) {
  const CaseLabel c = case_analysis(cfg, omega, h);
  const double ew = effw(omega, cfg.delta);
  const double cs = cfg.C * benefit(cfg, cfg.x_bar);
  const double d = cfg.delta;
  switch (c.label) {
    case Case::III: return (cs - (h * ew) * (h * ew)) / (h * h * ew);
    case Case::V: return (1.0 + d) * (cs * ((1.0 - d) * omega + d) / (h * h * omega * ew) - 1.0);
    default: throw std::domain_error("case_value_derivative: defined only inside Case III or Case V");
  }
}

OptimalContract optimal_contract_given_omega(const GameConfig& cfg, double omega) {
  require_omega(omega, "optimal_contract_given_omega");
  const ConfigReport cr = validate_config(cfg);
  const double bx = cfg.b * cfg.x_bar;
  const double ew = effw(omega, cfg.delta);
  const double xs = effort_star(cfg);

  OptimalContract out;
  out.contract = {bx / omega, 0.0, omega, 0.0};
  out.x1 = omega == 1.0 ? xs : cfg.x_bar;
  out.x2 = xs;
  out.profile = mixed_profile(cfg, out.contract, out.x1, out.x2);
  if (!out.profile.stage1_idle) {
    out.profile.p1 = omega / ew;
    out.profile.q1 = 1.0 - omega / ew * cfg.C / bx;
  }
  if (!out.profile.stage2_idle) {
    out.profile.p2 = 1.0;
    out.profile.q2 = 1.0 - cfg.C / bx;
  }
  if (out.profile.valid) {
    out.operator_value = operator_eu(cfg, out.contract, out.x1, out.x2);
    out.sensor_value = sensor_eu(cfg, out.contract, out.x1, out.x2);
  }
  out.objective_value = omega_objective(cfg, omega);
  out.regime_ok = cr.regime_ok;
  out.ir_ok = out.profile.valid && nonnegative(out.operator_value, out.contract.h);
  out.case_label = case_analysis(cfg, omega, out.contract.h);
  return out;
}

double omega_objective(const GameConfig& cfg, double omega) {
  require_omega(omega, "omega_objective");
  const double bx = cfg.b * cfg.x_bar;
  const double ew = effw(omega, cfg.delta);
  const double xs = effort_star(cfg);
  const double d = cfg.delta;
  const double C = cfg.C;
  return -(1.0 + d) * C + (1.0 - omega / ew * (C / bx)) * (benefit(cfg, cfg.x_bar) - bx * ew / omega) +
         d * (1.0 - C / bx) * (benefit(cfg, xs) - cfg.b * xs);
}

double omega_objective_derivative(const GameConfig& cfg, double omega) {
  require_omega(omega, "omega_objective_derivative");
  const double bx = cfg.b * cfg.x_bar;
  const double f = effw(omega, cfg.delta) / omega;
  const double df = -(1.0 + cfg.delta) / (omega * omega);
  return -bx * df * (1.0 - benefit(cfg, cfg.x_bar) * cfg.C / (f * f * bx * bx));
}

OmegaSweep optimal_omega(const GameConfig& cfg, int grid_n) {
  if (grid_n < 1) throw std::invalid_argument("optimal_omega: grid_n must be at least 1");
  OmegaSweep sweep;
  sweep.regime_ok = validate_config(cfg).regime_ok;
  sweep.nondecreasing = true;
  sweep.rows.reserve(grid_n);
  for (int i = 1; i <= grid_n; ++i) {
    const double omega = i == grid_n ? 1.0 : static_cast<double>(i) / grid_n;
    SweepRow row{omega, optimal_contract_given_omega(cfg, omega)};
    if (!sweep.rows.empty() && row.result.operator_value < sweep.rows.back().result.operator_value) {
      sweep.nondecreasing = false;
    }
    if (sweep.rows.empty() || row.result.operator_value > sweep.best_value) {
      sweep.best_value = row.result.operator_value;
      sweep.omega_star = omega;
    }
    sweep.rows.push_back(std::move(row));
  }
  return sweep;
}

void write_sweep_csv(std::ostream& os, const OmegaSweep& sweep) {
  os << kSweepCsvHeader << '\n';
  for (const auto& row : sweep.rows) {
    const auto& r = row.result;
    os << fmt(row.omega) << ',' << fmt(r.contract.h) << ',' << fmt(r.contract.gamma) << ',' << fmt(r.x1) << ','
       << fmt(r.x2) << ',' << fmt(r.profile.p1) << ',' << fmt(r.profile.p2) << ',' << fmt(r.profile.q1) << ','
       << fmt(r.profile.q2) << ',' << fmt(r.operator_value) << ',' << fmt(r.sensor_value) << ','
       << (r.regime_ok ? 1 : 0) << ',' << (r.ir_ok ? 1 : 0) << '\n';
  }
}

ContractGrid default_contract_grid(const GameConfig& cfg) {
  constexpr int n = 101;
  const double bx = cfg.b * cfg.x_bar;
  ContractGrid g;
  for (int i = 0; i < n; ++i) {
    g.h.push_back(4.0 * bx * i / (n - 1));
    g.gamma.push_back(bx * i / (n - 1));
    g.omega.push_back(static_cast<double>(i + 1) / n);
  }
  g.omega.back() = 1.0;
  g.effort = default_effort_grid(cfg, 51);
  return g;
}

LatticePoint evaluate_lattice_point(const GameConfig& cfg, const ContractParams& contract,
                                    std::span<const double> effort_grid, double tie_tol) {
  LatticePoint pt;
  pt.contract = contract;
  if (!(contract.omega > 0.0) || !(contract.omega * contract.h > cfg.C) || !(contract.h + contract.gamma > 0.0)) {
    return pt;
  }

  struct Candidate {
    double x1, x2, sensor, op;
  };
  std::vector<Candidate> cands;
  cands.reserve(effort_grid.size() * effort_grid.size());
  for (double x1 : effort_grid) {
    for (double x2 : effort_grid) {
      const EquilibriumProfile prof = mixed_profile(cfg, contract, x1, x2);
      if (!prof.valid) continue;
      const PayoffPair v = exact_payoffs(cfg, contract, BehavioralStrategy::from_profile(prof));
      cands.push_back({x1, x2, v.sensor, v.op});
    }
  }
  if (cands.empty()) return pt;

  double best_sensor = -INFINITY;
  for (const auto& c : cands) best_sensor = std::max(best_sensor, c.sensor);
  const double slack = tie_tol * std::max(1.0, std::abs(best_sensor));
  const Candidate* pick = nullptr;
  for (const auto& c : cands) {
    if (best_sensor - c.sensor > slack) continue;
    if (pick == nullptr || c.op > pick->op) pick = &c;
  }
  pt.participates = true;
  pt.x1 = pick->x1;
  pt.x2 = pick->x2;
  pt.sensor_value = pick->sensor;
  pt.operator_value = pick->op;
  return pt;
}

GridSearchResult grid_search_contract(const GameConfig& cfg, const ContractGrid& grid, int threads) {
  check_grid(grid);
  validate_config(cfg);
  const std::size_t ng = grid.gamma.size();
  const std::size_t nw = grid.omega.size();
  const std::size_t total = grid.h.size() * ng * nw;
  std::vector<LatticePoint> points(total);
  const int nt = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (std::size_t idx = 0; idx < total; ++idx) {
    const ContractParams c{grid.h[idx / (ng * nw)], grid.gamma[(idx / nw) % ng], grid.omega[idx % nw], 0.0};
    points[idx] = evaluate_lattice_point(cfg, c, grid.effort);
  }
  return finish_search(cfg, grid, points);
}

GridSearchResult grid_search_contract_serial(const GameConfig& cfg, const ContractGrid& grid) {
  check_grid(grid);
  validate_config(cfg);
  std::vector<LatticePoint> points;
  points.reserve(grid.h.size() * grid.gamma.size() * grid.omega.size());
  for (double h : grid.h) {
    for (double g : grid.gamma) {
      for (double w : grid.omega) {
        points.push_back(evaluate_lattice_point(cfg, {h, g, w, 0.0}, grid.effort));
      }
    }
  }
  return finish_search(cfg, grid, points);
}

ValidityReport assess_contract(const GameConfig& cfg, const ContractParams& contract, double x1, double x2) {
  validate_contract(contract);
  ValidityReport rep;
  rep.mixed_exists = contract.omega * contract.h > cfg.C;
  if (contract.omega == 0.0) {
    rep.diagnostics.push_back({"omega==0", 0.0, "no mixed equilibrium without a stage-2 reputation weight"});
    return rep;
  }
  const EquilibriumProfile prof = mixed_profile(cfg, contract, x1, x2);
  rep.diagnostics = prof.diagnostics;
  rep.probs_in_range = true;
  for (const auto& d : prof.diagnostics) {
    if (d.name.find("_range") != std::string::npos || d.name == "h+gamma==0") rep.probs_in_range = false;
  }
  if (prof.valid) {
    rep.operator_ir = nonnegative(operator_eu(cfg, contract, x1, x2), contract.h);
    rep.sensor_ir = nonnegative(sensor_eu(cfg, contract, x1, x2), contract.h);
    if (!rep.operator_ir) rep.diagnostics.push_back({"operator_ir", operator_eu(cfg, contract, x1, x2), "operator prefers the outside option"});
    if (!rep.sensor_ir) rep.diagnostics.push_back({"sensor_ir", sensor_eu(cfg, contract, x1, x2), "sensor prefers to opt out"});
  }
  return rep;
}

}  // namespace repcontract
