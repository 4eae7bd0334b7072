// Key=value config files:
//
//   # reference configuration
//   b = 2
//   x_bar = 1
//   C = 0.2
//   delta = 0.9
//   benefit.family = power
//   benefit.a = 2
//   benefit.shape = 0.5
//
// Every key is required (either in the file or as an override). Unknown or
// repeated keys are errors.
#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "repcontract/model.hpp"

namespace repcontract {

using Override = std::pair<std::string, std::string>;

/// Splits "key=value"; throws std::invalid_argument when malformed.
Override parse_override(const std::string& text);

/// Throws std::invalid_argument with a line-numbered message on any error.
GameConfig parse_config(std::istream& in, const std::vector<Override>& overrides = {});
GameConfig load_config(const std::string& path, const std::vector<Override>& overrides = {});

void write_config(std::ostream& os, const GameConfig& cfg);

}  // namespace repcontract
