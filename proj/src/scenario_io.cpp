#include "l3/scenario_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "l3/error.hpp"

namespace l3 {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

struct Line {
  std::string key;
  int number;
  std::vector<std::string_view> values;

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(key, number, what); }

  void expect(std::size_t lo, std::size_t hi, const char* shape) const {
    if (values.size() < lo || values.size() > hi) fail(std::string("expected ") + shape);
  }

  double real(std::size_t i) const {
    double v = 0.0;
    const auto tok = values[i];
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      fail("'" + std::string(tok) + "' is not a number");
    }
    return v;
  }

  template <typename Int>
  Int integer(std::size_t i) const {
    Int v = 0;
    const auto tok = values[i];
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      fail("'" + std::string(tok) + "' is not an integer");
    }
    return v;
  }
};

using Setter = std::function<void(ScenarioConfig&, const Line&)>;

Setter real_field(double ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const Line& l) {
    l.expect(1, 1, "one number");
    c.*field = l.real(0);
  };
}

template <typename Sub>
Setter real_sub(Sub ScenarioConfig::*sub, double Sub::*field) {
  return [sub, field](ScenarioConfig& c, const Line& l) {
    l.expect(1, 1, "one number");
    (c.*sub).*field = l.real(0);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"zone_side", real_sub(&ScenarioConfig::grid, &GridConfig::zone_side)},
      {"block_side", real_sub(&ScenarioConfig::grid, &GridConfig::block_side)},
      {"origin",
       [](ScenarioConfig& c, const Line& l) {
         l.expect(2, 2, "x y");
         c.grid.origin = {l.real(0), l.real(1)};
       }},
      {"comm_range", real_sub(&ScenarioConfig::channel, &ChannelConfig::comm_range)},
      {"capture_threshold", real_sub(&ScenarioConfig::channel, &ChannelConfig::capture_threshold_db)},
      {"path_loss_exponent", real_sub(&ScenarioConfig::channel, &ChannelConfig::path_loss_exponent)},
      {"reference_power", real_sub(&ScenarioConfig::channel, &ChannelConfig::reference_power_db)},
      {"sensing_range", real_field(&ScenarioConfig::sensing_range)},
      {"slot_duration", real_field(&ScenarioConfig::slot_duration_ms)},
      {"vehicle_radius", real_field(&ScenarioConfig::vehicle_radius)},
      {"fresh_persistence", real_sub(&ScenarioConfig::access, &AccessConfig::fresh)},
      {"retry_persistence", real_sub(&ScenarioConfig::access, &AccessConfig::retry)},
      {"retry_cap", real_sub(&ScenarioConfig::access, &AccessConfig::retry_cap)},
      {"idle_growth", real_sub(&ScenarioConfig::access, &AccessConfig::idle_growth)},
      {"max_slots",
       [](ScenarioConfig& c, const Line& l) {
         l.expect(1, 1, "one integer");
         c.max_slots = l.integer<int>(0);
       }},
      {"mac",
       [](ScenarioConfig& c, const Line& l) {
         l.expect(1, 1, "l3 or csma");
         try {
           c.mac = parse_mac_mode(std::string(l.values[0]));
         } catch (const InvalidInput& e) {
           l.fail(e.what());
         }
       }},
      {"seed",
       [](ScenarioConfig& c, const Line& l) {
         l.expect(1, 1, "one unsigned integer");
         c.seed = l.integer<std::uint64_t>(0);
       }},
      {"cw_min",
       [](ScenarioConfig& c, const Line& l) {
         l.expect(1, 1, "one integer");
         c.csma.cw_min = l.integer<int>(0);
       }},
      {"cw_max",
       [](ScenarioConfig& c, const Line& l) {
         l.expect(1, 1, "one integer");
         c.csma.cw_max = l.integer<int>(0);
       }},
      {"backoff_slot_us", real_sub(&ScenarioConfig::csma, &CsmaConfig::backoff_slot_us)},
      {"placement",
       [](ScenarioConfig& c, const Line& l) {
         l.expect(5, 6, "count min_x min_y max_x max_y [min_separation]");
         RandomPlacement p{l.integer<int>(0), {l.real(1), l.real(2)}, {l.real(3), l.real(4)}, 1.0};
         if (l.values.size() == 6) p.min_separation = l.real(5);
         c.placement = p;
       }},
      {"initiators",
       [](ScenarioConfig& c, const Line& l) {
         std::vector<VehicleId> ids;
         for (std::size_t i = 0; i < l.values.size(); ++i) ids.push_back(l.integer<VehicleId>(i));
         c.initiators = ids;
       }},
      {"vehicle",
       [](ScenarioConfig& c, const Line& l) {
         l.expect(3, 3, "id x y");
         c.vehicles.push_back({l.integer<VehicleId>(0), {l.real(1), l.real(2)}});
       }},
      {"object",
       [](ScenarioConfig& c, const Line& l) {
         l.expect(3, 3, "x y radius");
         c.objects.push_back({{l.real(0), l.real(1)}, l.real(2)});
       }},
  };
  return table;
}

bool repeatable(const std::string& key) { return key == "vehicle" || key == "object"; }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;

    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(fields(raw).front()), number, "expected 'key = value'");
    }
    Line line{std::string(trim(raw.substr(0, eq))), number, fields(raw.substr(eq + 1))};
    if (line.key.empty()) throw ConfigError("", number, "missing key before '='");
    const auto it = setters().find(line.key);
    if (it == setters().end()) line.fail("unknown key");
    if (!repeatable(line.key) && !seen.insert(line.key).second) line.fail("key given twice");
    it->second(cfg, line);
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", 0, "cannot read scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string write_scenario(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "zone_side = " << num(c.grid.zone_side) << '\n'
     << "block_side = " << num(c.grid.block_side) << '\n'
     << "origin = " << num(c.grid.origin.x) << ' ' << num(c.grid.origin.y) << '\n'
     << "comm_range = " << num(c.channel.comm_range) << '\n'
     << "capture_threshold = " << num(c.channel.capture_threshold_db) << '\n'
     << "path_loss_exponent = " << num(c.channel.path_loss_exponent) << '\n'
     << "reference_power = " << num(c.channel.reference_power_db) << '\n'
     << "sensing_range = " << num(c.sensing_range) << '\n'
     << "slot_duration = " << num(c.slot_duration_ms) << '\n'
     << "vehicle_radius = " << num(c.vehicle_radius) << '\n'
     << "fresh_persistence = " << num(c.access.fresh) << '\n'
     << "retry_persistence = " << num(c.access.retry) << '\n'
     << "retry_cap = " << num(c.access.retry_cap) << '\n'
     << "idle_growth = " << num(c.access.idle_growth) << '\n'
     << "max_slots = " << c.max_slots << '\n'
     << "mac = " << to_string(c.mac) << '\n'
     << "seed = " << c.seed << '\n'
     << "cw_min = " << c.csma.cw_min << '\n'
     << "cw_max = " << c.csma.cw_max << '\n'
     << "backoff_slot_us = " << num(c.csma.backoff_slot_us) << '\n';
  if (c.placement) {
    const auto& p = *c.placement;
    os << "placement = " << p.count << ' ' << num(p.min.x) << ' ' << num(p.min.y) << ' ' << num(p.max.x)
       << ' ' << num(p.max.y) << ' ' << num(p.min_separation) << '\n';
  }
  if (c.initiators) {
    os << "initiators =";
    for (VehicleId id : *c.initiators) os << ' ' << id;
    os << '\n';
  }
  for (const auto& v : c.vehicles) os << "vehicle = " << v.id << ' ' << num(v.pos.x) << ' ' << num(v.pos.y) << '\n';
  for (const auto& o : c.objects) {
    os << "object = " << num(o.center.x) << ' ' << num(o.center.y) << ' ' << num(o.radius) << '\n';
  }
  return os.str();
}

}  // namespace l3
