#pragma once

#include <string>
#include <string_view>

#include "l3/sim.hpp"

namespace l3 {

/// Parses a scenario document: one `key = value` per line, `#` starts a
/// comment. Scalar keys may appear once; `vehicle = id x y` and
/// `object = x y radius` repeat. Missing keys keep their defaults.
/// Throws ConfigError naming the line and key on unknown keys, malformed or
/// repeated values. Semantic checks are left to ScenarioConfig::validate().
ScenarioConfig parse_scenario(std::string_view text);

/// Reads and parses a file; an unreadable path is a ConfigError too.
ScenarioConfig load_scenario(const std::string& path);

/// Emits every field, so parse_scenario(write_scenario(c)) == c.
std::string write_scenario(const ScenarioConfig& cfg);

}  // namespace l3
