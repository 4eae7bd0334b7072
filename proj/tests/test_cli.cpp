#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "src_cli.hpp"

namespace fs = std::filesystem;
using repcontract::cli::run;

namespace {

const fs::path kTmp = TEST_TMP_DIR;

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string ref_config() {
  fs::create_directories(kTmp);
  const fs::path p = kTmp / "reference.cfg";
  std::ofstream(p) << "b = 2\nx_bar = 1\nC = 0.2\ndelta = 0.9\n"
                      "benefit.family = power\nbenefit.a = 2\nbenefit.shape = 0.5\n";
  return p.string();
}

}  // namespace

TEST_CASE("solve at omega = 1") {
  const Result r = call({"solve", ref_config(), "--omega", "1"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["h"] == 2.0);
  CHECK(j["q1"] == 0.9);
  CHECK(j["q2"] == 0.9);
  CHECK(j["objective_value"] == 0.025);
  CHECK(j["operator_value"] == 0.475);
  CHECK(j["regime_ok"] == true);
  CHECK(j["case"]["label"] == "IV");
}

TEST_CASE("solve prints 12 significant digits and writes a manifest") {
  const fs::path out = kTmp / "solve_half.json";
  const Result r = call({"solve", ref_config(), "--omega", "0.5", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"p1\": 0.344827586207,") != std::string::npos);
  CHECK(r.out.find("\"operator_value\": -3.64396551724,") != std::string::npos);
  CHECK(slurp(out) == r.out);
  const auto m = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(m["command"] == "solve");
  CHECK(m["outputs"][0] == out.string());
  CHECK(m.contains("version"));
  CHECK(m["wall_clock"].contains("elapsed_seconds"));
}

TEST_CASE("usage and config errors exit 2") {
  CHECK(call({"solve", ref_config(), "--omega", "0"}).code == 2);
  CHECK(call({"solve", ref_config()}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"solve", (kTmp / "missing.cfg").string(), "--omega", "1"}).code == 2);
  CHECK(call({"solve", ref_config(), "--omega", "1", "--set", "delta=2"}).code == 2);
  CHECK(call({"solve", ref_config(), "--omega", "1", "--set", "nonsense"}).code == 2);
  const fs::path bad = kTmp / "bad.cfg";
  std::ofstream(bad) << "b = 2\nthis line is wrong\n";
  const Result r = call({"solve", bad.string(), "--omega", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("--set overrides file values") {
  const Result r = call({"solve", ref_config(), "--omega", "1", "--set", "b=4"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["h"] == 4.0);
}

TEST_CASE("--strict rejects out-of-regime configs") {
  const std::vector<std::string> base = {"solve", ref_config(), "--omega", "1", "--set", "b=0.5", "--set", "C=1.5"};
  CHECK(call(base).code == 0);
  auto strict = base;
  strict.push_back("--strict");
  const Result r = call(strict);
  CHECK(r.code == 3);
  CHECK(r.err.find("b*x_bar > sqrt(C*S(x_bar))") != std::string::npos);
}

TEST_CASE("sweep writes the CSV and reports the argmax") {
  const fs::path out = kTmp / "sweep.csv";
  const Result r = call({"sweep", ref_config(), "--grid-n", "101", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("argmax omega=1 ") != std::string::npos);
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "omega,h,gamma,x1,x2,p1,p2,q1,q2,operator_value,sensor_value,regime_ok,ir_ok");
  std::vector<double> values;
  while (std::getline(csv, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    REQUIRE(cols.size() == 13);
    values.push_back(std::stod(cols[9]));
  }
  REQUIRE(values.size() == 101);
  CHECK(*std::max_element(values.begin(), values.end()) == values.back());
  CHECK(fs::exists(out.string() + ".manifest.json"));

  const Result one = call({"sweep", ref_config(), "--grid-n", "1"});
  REQUIRE(one.code == 0);
  CHECK(std::count(one.out.begin(), one.out.end(), '\n') == 2);
  CHECK(one.out.find("\n1,2,0,") != std::string::npos);
}

TEST_CASE("unwritable output exits 4") {
  CHECK(call({"sweep", ref_config(), "--out", "/proc/no-such-dir/sweep.csv"}).code == 4);
  CHECK(call({"solve", ref_config(), "--omega", "1", "--out", (kTmp / "nodir" / "x.json").string()}).code == 4);
}

TEST_CASE("verify certifies the reference equilibrium") {
  const Result r = call({"verify", ref_config(), "--omega", "0.5", "--tol", "1e-9"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["certified"] == true);
}

TEST_CASE("verify rejects a corrupted profile") {
  const Result r = call({"verify", ref_config(), "--omega", "0.5", "--override", "p2=0.8"});
  CHECK(r.code == 1);
  CHECK(r.err.find("sensor stage 2 deviation NT") != std::string::npos);
  CHECK(call({"verify", ref_config(), "--omega", "0.5", "--override", "z=1"}).code == 2);
}

TEST_CASE("simulate compares against exact payoffs") {
  const fs::path a = kTmp / "traj_a.csv", b = kTmp / "traj_b.csv";
  const Result r = call({"simulate", ref_config(), "--omega", "0.5", "--episodes", "100000", "--seed", "42", "--out",
                         a.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("3-SE check: PASS") != std::string::npos);
  CHECK(call({"simulate", ref_config(), "--omega", "0.5", "--episodes", "100000", "--seed", "42", "--out",
              b.string()})
            .code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("episode,stage,truthful,verified,effort,report,reputation,payment,u_sensor,u_operator\n", 0) == 0);
  const auto m = nlohmann::json::parse(slurp(a.string() + ".manifest.json"));
  CHECK(m["seed"] == 42);

  const Result small = call({"simulate", ref_config(), "--omega", "0.5", "--episodes", "10"});
  CHECK(small.code == 0);
  CHECK(small.out.find("exact") != std::string::npos);
  CHECK(call({"simulate", ref_config(), "--omega", "0.5", "--episodes", "0"}).code == 2);
}
