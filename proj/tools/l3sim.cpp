// l3sim: run scenarios, sweeps and matrix dumps from the command line.
//
// Exit status: 0 converged, 1 configuration or usage error, 2 a run did not
// converge.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "l3/error.hpp"
#include "l3/scenario_io.hpp"
#include "l3/sim.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kConverged = 0;
constexpr int kConfigError = 1;
constexpr int kNotConverged = 2;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw l3::ConfigError("", 0, "cannot write " + path.string());
  out << text;
}

void prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw l3::ConfigError("", 0, "cannot create output directory " + dir + ": " + ec.message());
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + '\n';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L3 sensing-matrix sharing simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool trace = false;
  std::optional<std::string> mac_flag;

  auto* run_cmd = app.add_subcommand("run", "simulate one scenario file");
  run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--seed", seed, "override the scenario seed");
  run_cmd->add_flag("--trace", trace, "write the per-slot trace");
  run_cmd->add_option("--mac", mac_flag, "l3 or csma")->check(CLI::IsMember({"l3", "csma"}));

  std::string preset_name;
  std::vector<int> counts;
  std::optional<int> trials;
  auto* sweep_cmd = app.add_subcommand("sweep", "random-placement sweep over vehicle counts");
  sweep_cmd->add_option("--preset", preset_name, "paper-fig7, paper-fig8 or paper-fig9");
  sweep_cmd->add_option("--counts", counts, "vehicle counts, comma separated")->delimiter(',');
  sweep_cmd->add_option("--trials", trials, "trials per count");
  sweep_cmd->add_option("--scenario", scenario_path, "base scenario (defaults otherwise)");
  sweep_cmd->add_option("--out", out_dir, "output directory");
  sweep_cmd->add_option("--seed", seed, "master seed");
  sweep_cmd->add_option("--mac", mac_flag, "l3 or csma")->check(CLI::IsMember({"l3", "csma"}));

  l3::VehicleId vehicle = 0;
  auto* dump_cmd = app.add_subcommand("dump-matrix", "print a vehicle's initial sensing matrix");
  dump_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  dump_cmd->add_option("--vehicle", vehicle, "vehicle id")->required();
  dump_cmd->add_option("--seed", seed, "override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      l3::ScenarioConfig cfg = l3::load_scenario(scenario_path);
      if (seed) cfg.seed = *seed;
      if (mac_flag) cfg.mac = l3::parse_mac_mode(*mac_flag);
      const l3::RunResult r = l3::simulate(cfg);
      prepare_out(out_dir);
      write_file(fs::path(out_dir) / "metrics.csv", l3::metrics_csv(r.metrics));
      write_file(fs::path(out_dir) / "final_matrix.txt", l3::format_matrix(r.metrics.final_matrix));
      if (trace) write_file(fs::path(out_dir) / "trace.txt", join_lines(r.trace));
      std::cout << "mac=" << l3::to_string(cfg.mac) << " last_tx_slot=" << r.metrics.last_tx_slot
                << " quiescent_slot=" << r.metrics.quiescent_slot << " latency_ms=" << r.metrics.latency_ms
                << " converged=" << (r.metrics.converged ? "yes" : "no") << '\n';
      return r.metrics.converged ? kConverged : kNotConverged;
    }

    if (sweep_cmd->parsed()) {
      const l3::ScenarioConfig base = scenario_path.empty() ? l3::preset_base() : l3::load_scenario(scenario_path);
      l3::SweepPreset plan{"custom", counts, trials.value_or(20), {mac_flag ? l3::parse_mac_mode(*mac_flag) : base.mac}};
      if (!preset_name.empty()) {
        const auto p = l3::find_preset(preset_name);
        if (!p) throw l3::ConfigError("preset", 0, "unknown preset '" + preset_name + "'");
        plan = *p;
        if (!counts.empty()) plan.counts = counts;
        if (trials) plan.trials = *trials;
        if (mac_flag) plan.macs = {l3::parse_mac_mode(*mac_flag)};
      }
      if (plan.counts.empty()) throw l3::ConfigError("counts", 0, "give --counts or --preset");

      const auto rows = l3::run_preset(plan, base, seed.value_or(0));
      prepare_out(out_dir);
      write_file(fs::path(out_dir) / "sweep.csv", l3::sweep_csv(rows));
      bool all_converged = true;
      for (const auto& s : l3::summarize(rows)) {
        std::cout << "mac=" << l3::to_string(s.mac) << " count=" << s.count << " mean_slots=" << s.mean_slots
                  << " min=" << s.min_slots << " max=" << s.max_slots << " mean_latency_ms=" << s.mean_latency_ms
                  << " converged=" << s.converged_trials << '/' << s.trials << '\n';
        all_converged = all_converged && s.converged_trials == s.trials;
      }
      return all_converged ? kConverged : kNotConverged;
    }

    l3::ScenarioConfig cfg = l3::load_scenario(scenario_path);
    if (seed) cfg.seed = *seed;
    cfg.validate();
    const auto specs = l3::materialize_vehicles(cfg);
    const auto it = std::find_if(specs.begin(), specs.end(), [&](const l3::VehicleSpec& s) { return s.id == vehicle; });
    if (it == specs.end()) throw l3::ConfigError("vehicle", 0, "no vehicle with id " + std::to_string(vehicle));
    const l3::GroundTruth world = l3::build_world(cfg, specs);
    const l3::SensingMatrix m =
        l3::perceive(it->id, it->pos, world, l3::locate_zone(it->pos, cfg.grid), cfg.grid, cfg.sensing_range);
    std::cout << l3::format_matrix(m);
    return kConverged;
  } catch (const l3::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
