// Optimal contract selection: the five-case analysis over h, the optimal
// contract for a fixed reputation weight, the omega sweep, and a brute-force
// lattice search used to cross-check them.
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repcontract/equilibrium.hpp"
#include "repcontract/model.hpp"

namespace repcontract {

enum class Case { I, II, III, IV, V };
std::string_view to_string(Case c);

/// Which effort pair a given h induces (gamma = 0) and what the operator
/// earns there. `operator_value` is 0 when the induced profile is invalid
/// (outside option).
struct CaseLabel {
  Case label = Case::I;
  std::string h_range;
  double lower = 0.0;  // b x_bar / effw
  double upper = 0.0;  // b x_bar / omega
  double x1 = 0.0, x2 = 0.0;
  double operator_value = 0.0;
  bool profile_valid = false;
};

CaseLabel case_analysis(const GameConfig& cfg, double omega, double h);

/// dE[U^P]/dh inside Case III or Case V; throws std::domain_error elsewhere.
double case_value_derivative(const GameConfig& cfg, double omega, double h);

struct OptimalContract {
  ContractParams contract;
  double x1 = 0.0, x2 = 0.0;
  EquilibriumProfile profile;
  double operator_value = 0.0;   // operator_eu at (x1, x2)
  double sensor_value = 0.0;
  double objective_value = 0.0;  // omega_objective(omega)
  bool regime_ok = false;
  bool ir_ok = false;  // operator_value >= 0; otherwise the outside option is preferred
  CaseLabel case_label;
};

/// gamma = 0, h = b x_bar / omega, efforts (x_bar, x*). At omega = 1 the
/// sensor is indifferent over both efforts and the operator-preferred
/// (x*, x*) is returned. Probabilities use the simplified closed forms.
OptimalContract optimal_contract_given_omega(const GameConfig& cfg, double omega);

/// Operator value of the optimal-h contract with efforts (x_bar, x*), as a
/// function of omega.
double omega_objective(const GameConfig& cfg, double omega);
double omega_objective_derivative(const GameConfig& cfg, double omega);

struct SweepRow {
  double omega = 0.0;
  OptimalContract result;
};

struct OmegaSweep {
  double omega_star = 0.0;
  double best_value = 0.0;
  bool regime_ok = false;
  bool nondecreasing = false;
  std::vector<SweepRow> rows;
};

/// omega_i = i / grid_n for i = 1..grid_n.
OmegaSweep optimal_omega(const GameConfig& cfg, int grid_n);

inline constexpr std::string_view kSweepCsvHeader =
    "omega,h,gamma,x1,x2,p1,p2,q1,q2,operator_value,sensor_value,regime_ok,ir_ok";
void write_sweep_csv(std::ostream& os, const OmegaSweep& sweep);

struct ContractGrid {
  std::vector<double> h;
  std::vector<double> gamma;
  std::vector<double> omega;
  std::vector<double> effort;
};

/// 101 points per contract dimension (h on [0, 4 b x_bar], gamma on
/// [0, b x_bar], omega on [1/101, 1]) and the default 51-point effort grid.
ContractGrid default_contract_grid(const GameConfig& cfg);

struct LatticePoint {
  ContractParams contract;
  double x1 = 0.0, x2 = 0.0;
  double operator_value = 0.0;
  double sensor_value = 0.0;
  bool participates = false;  // valid profile exists on the effort grid
};

/// `best` is the lattice maximizer as evaluated (possibly negative). When no
/// lattice point gives the operator a positive value it keeps the outside
/// option: `outside_option` is set and `value` is 0.
struct GridSearchResult {
  OptimalContract best;
  bool outside_option = false;
  double value = 0.0;
  std::size_t lattice_points = 0;
};

/// Evaluates one lattice point: the sensor best-responds over effort pairs
/// using exact game-tree payoffs under the induced mixed profile; ties go to
/// the operator-preferred pair, then the smallest efforts.
LatticePoint evaluate_lattice_point(const GameConfig& cfg, const ContractParams& contract,
                                    std::span<const double> effort_grid, double tie_tol = 1e-9);

/// OpenMP over lattice points; deterministic argmax with lexicographic
/// (h, gamma, omega) tie-breaking.
GridSearchResult grid_search_contract(const GameConfig& cfg, const ContractGrid& grid, int threads = 0);
/// Serial reference of the same search.
GridSearchResult grid_search_contract_serial(const GameConfig& cfg, const ContractGrid& grid);

/// Existence, range and participation summary at efforts (x1, x2).
ValidityReport assess_contract(const GameConfig& cfg, const ContractParams& contract, double x1, double x2);

}  // namespace repcontract
