#include "src_cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "repcontract/config_io.hpp"
#include "repcontract/design.hpp"
#include "repcontract/gametree.hpp"
#include "repcontract/montecarlo.hpp"

#ifndef REPCONTRACT_VERSION
#define REPCONTRACT_VERSION "0.0.0"
#endif

namespace repcontract::cli {

namespace {

using nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StrictError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::string> overrides;
  double omega = 1.0;
  int grid_n = 101;
  std::uint64_t episodes = 100000;
  std::uint64_t seed = 42;
  std::uint64_t log_episodes = 1000;
  double tol = 1e-9;
  bool strict = false;
  int threads = 0;
  std::string out;
};

// 12 significant digits; the JSON writer then prints the shortest
// round-trip form of the rounded value.
ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string g12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<Override> parse_sets(const std::vector<std::string>& sets) {
  std::vector<Override> out;
  for (const auto& s : sets) out.push_back(parse_override(s));
  return out;
}

GameConfig load(const Options& o) { return load_config(o.config, parse_sets(o.sets)); }

void enforce_regime(const Options& o, const GameConfig& cfg) {
  if (!o.strict || validate_config(cfg).regime_ok) return;
  const double lhs = cfg.b * cfg.x_bar;
  const double rhs = std::sqrt(cfg.C * benefit(cfg, cfg.x_bar));
  throw StrictError("regime violated: b*x_bar > sqrt(C*S(x_bar)) fails (" + g12(lhs) + " <= " + g12(rhs) + ")");
}

void require_omega(double omega) {
  if (!(omega > 0.0 && omega <= 1.0)) throw std::invalid_argument("--omega must lie in (0, 1], got " + g12(omega));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Run {
 public:
  Run(std::string command, const Options& o, const std::vector<std::string>& args)
      : command_(std::move(command)), opts_(o), args_(args), start_(std::chrono::steady_clock::now()) {}

  // Writes `text` to `path` and a manifest sidecar next to it.
  void emit(const std::string& path, const std::string& text, bool with_seed) {
    write_file(path, text);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    ordered_json m;
    m["command"] = command_;
    m["argv"] = args_;
    m["config"] = opts_.config;
    ordered_json ov = ordered_json::object();
    for (const auto& [k, v] : parse_sets(opts_.sets)) ov[k] = v;
    m["overrides"] = ov;
    ordered_json prof = ordered_json::object();
    for (const auto& s : opts_.overrides) {
      const auto [k, v] = parse_override(s);
      prof[k] = v;
    }
    if (!prof.empty()) m["profile_overrides"] = prof;
    m["outputs"] = {path};
    m["seed"] = with_seed ? ordered_json(opts_.seed) : ordered_json(nullptr);
    m["version"] = REPCONTRACT_VERSION;
    m["wall_clock"] = {{"started_utc", started_utc_}, {"elapsed_seconds", num(secs)}};
    write_file(path + ".manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string command_;
  const Options& opts_;
  std::vector<std::string> args_;
  std::chrono::steady_clock::time_point start_;
  std::string started_utc_ = utc_now();
};

ordered_json config_json(const GameConfig& cfg) {
  return {{"b", num(cfg.b)},
          {"x_bar", num(cfg.x_bar)},
          {"C", num(cfg.C)},
          {"delta", num(cfg.delta)},
          {"benefit", {{"family", to_string(cfg.benefit.family)}, {"a", num(cfg.benefit.a)}, {"shape", num(cfg.benefit.shape)}}}};
}

ordered_json diagnostics_json(const std::vector<Diagnostic>& ds) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : ds) arr.push_back({{"name", d.name}, {"value", num(d.value)}, {"message", d.message}});
  return arr;
}

ordered_json profile_json(const EquilibriumProfile& p) {
  return {{"x1", num(p.x1)}, {"x2", num(p.x2)}, {"p1", num(p.p1)}, {"p2", num(p.p2)},
          {"q1", num(p.q1)}, {"q2", num(p.q2)}, {"valid", p.valid}};
}

// --override keys adjust the equilibrium profile before it is checked.
void apply_profile_overrides(EquilibriumProfile& prof, const std::vector<std::string>& overrides) {
  for (const auto& s : overrides) {
    const auto [key, text] = parse_override(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw std::invalid_argument("--override " + key + ": not a number");
    if (key == "p1") prof.p1 = v;
    else if (key == "p2") prof.p2 = v;
    else if (key == "q1") prof.q1 = v;
    else if (key == "q2") prof.q2 = v;
    else if (key == "x1") { prof.x1 = v; prof.stage1_idle = v == 0.0; }
    else if (key == "x2") { prof.x2 = v; prof.stage2_idle = v == 0.0; }
    else throw std::invalid_argument("--override: unknown key '" + key + "' (expected p1, p2, q1, q2, x1, x2)");
  }
}

int cmd_solve(const Options& o, Run& run, std::ostream& out) {
  const GameConfig cfg = load(o);
  enforce_regime(o, cfg);
  require_omega(o.omega);
  const OptimalContract r = optimal_contract_given_omega(cfg, o.omega);

  ordered_json j;
  j["command"] = "solve";
  j["config"] = config_json(cfg);
  j["omega"] = num(o.omega);
  j["x_star"] = num(effort_star(cfg));
  j["h"] = num(r.contract.h);
  j["gamma"] = num(r.contract.gamma);
  j["x1"] = num(r.x1);
  j["x2"] = num(r.x2);
  j["p1"] = num(r.profile.p1);
  j["p2"] = num(r.profile.p2);
  j["q1"] = num(r.profile.q1);
  j["q2"] = num(r.profile.q2);
  j["operator_value"] = num(r.operator_value);
  j["sensor_value"] = num(r.sensor_value);
  j["objective_value"] = num(r.objective_value);
  j["profile_valid"] = r.profile.valid;
  j["regime_ok"] = r.regime_ok;
  j["ir_ok"] = r.ir_ok;
  // An IR-violating contract is not offered; the operator keeps 0.
  j["outside_option"] = !r.ir_ok;
  j["realized_value"] = num(r.ir_ok ? r.operator_value : 0.0);
  j["case"] = {{"label", to_string(r.case_label.label)},
               {"h_range", r.case_label.h_range},
               {"lower", num(r.case_label.lower)},
               {"upper", num(r.case_label.upper)}};
  j["diagnostics"] = diagnostics_json(r.profile.diagnostics);

  const std::string text = j.dump(2) + "\n";
  if (!o.out.empty()) run.emit(o.out, text, false);
  out << text;
  return kOk;
}

int cmd_sweep(const Options& o, Run& run, std::ostream& out, std::ostream& err) {
  const GameConfig cfg = load(o);
  enforce_regime(o, cfg);
  if (o.grid_n < 1) throw std::invalid_argument("--grid-n must be at least 1");
  const OmegaSweep sweep = optimal_omega(cfg, o.grid_n);
  std::ostringstream csv;
  write_sweep_csv(csv, sweep);
  if (o.out.empty()) {
    out << csv.str();
  } else {
    run.emit(o.out, csv.str(), false);
  }
  std::ostream& summary = o.out.empty() ? err : out;
  summary << "argmax omega=" << g12(sweep.omega_star) << " operator_value=" << g12(sweep.best_value)
          << " nondecreasing=" << (sweep.nondecreasing ? "yes" : "no")
          << " regime_ok=" << (sweep.regime_ok ? "yes" : "no") << '\n';
  return kOk;
}

int cmd_verify(const Options& o, Run& run, std::ostream& out, std::ostream& err) {
  const GameConfig cfg = load(o);
  enforce_regime(o, cfg);
  require_omega(o.omega);
  if (!(o.tol >= 0.0)) throw std::invalid_argument("--tol must be non-negative");
  const OptimalContract r = optimal_contract_given_omega(cfg, o.omega);
  EquilibriumProfile prof = r.profile;
  apply_profile_overrides(prof, o.overrides);

  const auto grid = default_effort_grid(cfg, 51);
  const DeviationReport rep = check_equilibrium(cfg, r.contract, prof, grid, o.tol);
  const IndifferenceGaps gaps = indifference_gaps(cfg, r.contract, prof);

  ordered_json j;
  j["command"] = "verify";
  j["config"] = config_json(cfg);
  j["contract"] = {{"h", num(r.contract.h)}, {"gamma", num(r.contract.gamma)}, {"omega", num(r.contract.omega)}};
  j["profile"] = profile_json(prof);
  ordered_json devs = ordered_json::array();
  for (const auto& d : rep.deviations) {
    devs.push_back({{"player", d.player}, {"stage", d.stage}, {"action", d.action}, {"gain", num(d.gain)}});
  }
  j["deviations"] = devs;
  j["sensor_gain"] = num(rep.sensor_gain);
  j["operator_gain"] = num(rep.operator_gain);
  j["max_gain"] = num(rep.max_gain);
  j["tolerance"] = num(rep.tolerance);
  j["indifference_gaps"] = {{"sensor1", num(gaps.sensor1)},
                            {"sensor2", num(gaps.sensor2)},
                            {"operator1", num(gaps.operator1)},
                            {"operator2", num(gaps.operator2)},
                            {"stage1_degenerate", gaps.stage1_degenerate},
                            {"stage2_degenerate", gaps.stage2_degenerate}};
  j["certified"] = rep.certified;

  const std::string text = j.dump(2) + "\n";
  if (!o.out.empty()) run.emit(o.out, text, false);
  out << text;
  if (rep.certified) return kOk;
  const Deviation& w = rep.worst();
  err << "certification failed: " << w.player << " stage " << (w.stage == 0 ? std::string("1+2") : std::to_string(w.stage))
      << " deviation " << w.action << " gains " << g12(w.gain) << " > tol " << g12(o.tol) << '\n';
  return kCertFail;
}

int cmd_simulate(const Options& o, Run& run, std::ostream& out) {
  const GameConfig cfg = load(o);
  enforce_regime(o, cfg);
  require_omega(o.omega);
  if (o.episodes == 0) throw std::invalid_argument("--episodes must be at least 1");
  const OptimalContract r = optimal_contract_given_omega(cfg, o.omega);
  EquilibriumProfile prof = r.profile;
  apply_profile_overrides(prof, o.overrides);

  SimulationSpec spec;
  spec.episodes = o.episodes;
  spec.seed = o.seed;
  spec.strategy = BehavioralStrategy::from_profile(prof);
  spec.contract = r.contract;
  spec.cfg = cfg;

  const SimulationResult res = simulate(spec, o.threads);
  const PayoffPair exact = exact_payoffs(cfg, r.contract, spec.strategy);

  if (!o.out.empty()) {
    std::ostringstream csv;
    write_trajectory_csv(csv, trajectory_log(spec, std::min(o.log_episodes, o.episodes)));
    run.emit(o.out, csv.str(), true);
  }

  auto within = [](double mean, double se, double ref) {
    return std::abs(mean - ref) <= 3.0 * se + 1e-12 * std::max(1.0, std::abs(ref));
  };
  const bool ok_s = within(res.mean_sensor, res.se_sensor, exact.sensor);
  const bool ok_o = within(res.mean_operator, res.se_operator, exact.op);

  char line[256];
  out << "episodes " << res.episodes << "  seed " << o.seed << "  omega " << g12(o.omega) << '\n';
  std::snprintf(line, sizeof line, "%-9s %16s %16s %16s %10s\n", "player", "mean", "se", "exact", "result");
  out << line;
  std::snprintf(line, sizeof line, "%-9s %16.12g %16.12g %16.12g %10s\n", "sensor", res.mean_sensor, res.se_sensor,
                exact.sensor, ok_s ? "PASS" : "FAIL");
  out << line;
  std::snprintf(line, sizeof line, "%-9s %16.12g %16.12g %16.12g %10s\n", "operator", res.mean_operator,
                res.se_operator, exact.op, ok_o ? "PASS" : "FAIL");
  out << line;
  const double q[2] = {spec.strategy.sensor1.truth_prob, spec.strategy.sensor2[0].truth_prob};
  const double p[2] = {spec.strategy.verify1, spec.strategy.verify2[0]};
  for (int k = 0; k < 2; ++k) {
    std::snprintf(line, sizeof line, "stage %d   T freq %.12g (q=%.12g)   V freq %.12g (p=%.12g)\n", k + 1,
                  res.truthful_freq[k], q[k], res.verified_freq[k], p[k]);
    out << line;
  }
  out << "3-SE check: " << (ok_s && ok_o ? "PASS" : "FAIL") << '\n';
  return kOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("config", o.config, "Config file (key = value)")->required();
  sub->add_option("--set", o.sets, "Config override key=value (repeatable)");
  sub->add_flag("--strict", o.strict, "Exit 3 when b*x_bar > sqrt(C*S(x_bar)) fails");
  sub->add_option("--out", o.out, "Output file; a .manifest.json sidecar is written next to it");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Operator/sensor reputation contract solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", REPCONTRACT_VERSION);

  auto* solve = app.add_subcommand("solve", "Optimal contract for a fixed reputation weight (JSON)");
  add_common(solve, o);
  solve->add_option("--omega", o.omega, "Reputation weight in (0, 1]")->required();

  auto* sweep = app.add_subcommand("sweep", "Optimal contract over omega = i/n, i = 1..n (CSV)");
  add_common(sweep, o);
  sweep->add_option("--grid-n", o.grid_n, "Number of omega grid points")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Certify the equilibrium against the game-tree oracle");
  add_common(verify, o);
  verify->add_option("--omega", o.omega, "Reputation weight in (0, 1]")->required();
  verify->add_option("--tol", o.tol, "Largest tolerated deviation gain")->capture_default_str();
  verify->add_option("--override", o.overrides, "Profile override p1|p2|q1|q2|x1|x2=value (repeatable)");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo check against exact payoffs");
  add_common(sim, o);
  sim->add_option("--omega", o.omega, "Reputation weight in (0, 1]")->required();
  sim->add_option("--episodes", o.episodes, "Number of episodes")->capture_default_str();
  sim->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  sim->add_option("--log-episodes", o.log_episodes, "Episodes written to the trajectory CSV")->capture_default_str();
  sim->add_option("--threads", o.threads, "Worker threads (0 = OpenMP default)")->capture_default_str();
  sim->add_option("--override", o.overrides, "Profile override p1|p2|q1|q2|x1|x2=value (repeatable)");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("repcontract");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  Run record(chosen->get_name(), o, args);
  try {
    if (chosen == solve) return cmd_solve(o, record, out);
    if (chosen == sweep) return cmd_sweep(o, record, out, err);
    if (chosen == verify) return cmd_verify(o, record, out, err);
    return cmd_simulate(o, record, out);
  } catch (const StrictError& e) {
    err << "error: " << e.what() << '\n';
    return kStrict;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace repcontract::cli
