#include "repcontract/config_io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace repcontract {

namespace {

constexpr std::array<std::string_view, 7> kKeys = {"b", "x_bar", "C", "delta", "benefit.family", "benefit.a",
                                                   "benefit.shape"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool known_key(const std::string& key) {
  for (auto k : kKeys) {
    if (k == key) return true;
  }
  return false;
}

double to_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument(key + ": not a number: '" + text + "'");
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Override parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + text + "'");
  Override o{trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1))};
  if (o.first.empty() || o.second.empty()) throw std::invalid_argument("expected key=value, got '" + text + "'");
  return o;
}

GameConfig parse_config(std::istream& in, const std::vector<Override>& overrides) {
  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!known_key(key)) throw std::invalid_argument(where + "unknown key '" + key + "'");
    if (value.empty()) throw std::invalid_argument(where + "empty value for '" + key + "'");
    if (!values.emplace(key, value).second) throw std::invalid_argument(where + "duplicate key '" + key + "'");
  }
  for (const auto& [key, value] : overrides) {
    if (!known_key(key)) throw std::invalid_argument("override: unknown key '" + key + "'");
    values[key] = value;
  }
  for (auto k : kKeys) {
    if (!values.count(std::string(k))) throw std::invalid_argument("missing key '" + std::string(k) + "'");
  }

  GameConfig cfg;
  cfg.b = to_number("b", values["b"]);
  cfg.x_bar = to_number("x_bar", values["x_bar"]);
  cfg.C = to_number("C", values["C"]);
  cfg.delta = to_number("delta", values["delta"]);
  cfg.benefit.family = parse_benefit_family(values["benefit.family"]);
  cfg.benefit.a = to_number("benefit.a", values["benefit.a"]);
  cfg.benefit.shape = to_number("benefit.shape", values["benefit.shape"]);
  validate_config(cfg);
  return cfg;
}

GameConfig load_config(const std::string& path, const std::vector<Override>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  try {
    return parse_config(in, overrides);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_config(std::ostream& os, const GameConfig& cfg) {
  os << "b = " << fmt(cfg.b) << '\n'
     << "x_bar = " << fmt(cfg.x_bar) << '\n'
     << "C = " << fmt(cfg.C) << '\n'
     << "delta = " << fmt(cfg.delta) << '\n'
     << "benefit.family = " << to_string(cfg.benefit.family) << '\n'
     << "benefit.a = " << fmt(cfg.benefit.a) << '\n'
     << "benefit.shape = " << fmt(cfg.benefit.shape) << '\n';
}

}  // namespace repcontract
