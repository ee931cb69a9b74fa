// wheelsim: command-line front end for the slope, cycle and case-study runs.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "wheelsim/case_study.hpp"
#include "wheelsim/config.hpp"
#include "wheelsim/cycle.hpp"
#include "wheelsim/drive_strategy.hpp"
#include "wheelsim/efficiency_map.hpp"
#include "wheelsim/error.hpp"
#include "wheelsim/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wheelsim;

namespace {

struct GlobalOptions {
  std::string config;
  std::string out;
  std::vector<std::string> params;
  unsigned parallel = 1;
};

std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

RunConfig load(const GlobalOptions& g) {
  std::optional<fs::path> explicit_path;
  if (!g.config.empty()) explicit_path = fs::path(g.config);
  RunConfig config = load_run_config(resolve_config_path(explicit_path), g.params);
  if (!g.out.empty()) config.output_dir = g.out;
  return config;
}

// Runs fn(0..count-1) on up to `workers` threads. Results land at their own
// index so the output order never depends on scheduling. The first failure
// (lowest index) is rethrown.
template <typename T>
std::vector<T> run_indexed(std::size_t count, unsigned workers,
                           const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

std::string slope_tag(double slope_deg) { return fmt("%+g", slope_deg); }

// ---- map -------------------------------------------------------------------

struct MapArgs {
  std::string mode = "all";
  std::string file;
  double threshold = 0.60;
};

json map_stats_json(const EfficiencyMap& map, double threshold, const std::string& fingerprint) {
  return {{"mode", std::string(to_string(map.mode()))},
          {"speed_nodes", map.speed_nodes()},
          {"torque_nodes", map.torque_nodes()},
          {"max_rpm", map.max_rpm()},
          {"max_torque_nm", map.max_torque_nm()},
          {"peak", map.max_value()},
          {"floor", map.floor_value()},
          {"area_threshold", threshold},
          {"area_fraction", map_area_stats(map, threshold)},
          {"fingerprint", fingerprint}};
}

std::vector<std::pair<std::string, const MapSource*>> selected_maps(const RunConfig& c,
                                                                    const std::string& mode) {
  std::vector<std::pair<std::string, const MapSource*>> all = {
      {"motoring", &c.motoring_map}, {"braking", &c.braking_map}, {"baseline", &c.baseline_map}};
  if (mode == "all") return all;
  for (const auto& entry : all) {
    if (entry.first == mode) return {entry};
  }
  throw ConfigError("--mode must be motoring|braking|baseline|all, got '" + mode + "'");
}

int cmd_map_synth(const GlobalOptions& g, const MapArgs& a) {
  const RunConfig c = load(g);
  json report = report_header("map_synth", c);
  for (const auto& [name, src] : selected_maps(c, a.mode)) {
    const EfficiencyMap map = src->build();
    const fs::path path = c.output_dir / (name + "_map.csv");
    save_map(map, path);
    report["maps"][name] = map_stats_json(map, a.threshold, src->fingerprint());
    report["maps"][name]["file"] = path.generic_string();
    std::cout << name << ": peak " << fmt("%.4f", map.max_value()) << ", "
              << fmt("%.1f", 100.0 * map_area_stats(map, a.threshold)) << "% of nodes above "
              << fmt("%.2f", a.threshold) << " -> " << path.string() << "\n";
  }
  emit_report(report, c.output_dir / "map_synth.json");
  return 0;
}

int cmd_map_stats(const GlobalOptions& g, const MapArgs& a) {
  json out;
  if (!a.file.empty()) {
    const std::string mode = a.mode == "all" ? "motoring" : a.mode;
    const EfficiencyMap map = load_map(a.file, map_mode_from_string(mode == "baseline" ? "motoring" : mode));
    out[mode] = map_stats_json(map, a.threshold, "file:" + map_fingerprint(map));
  } else {
    const RunConfig c = load(g);
    for (const auto& [name, src] : selected_maps(c, a.mode)) {
      out[name] = map_stats_json(src->build(), a.threshold, src->fingerprint());
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_map_validate(const GlobalOptions& g, const MapArgs& a) {
  if (!a.file.empty()) {
    const std::string mode = a.mode == "all" || a.mode == "baseline" ? "motoring" : a.mode;
    const EfficiencyMap map = load_map(a.file, map_mode_from_string(mode));
    std::cout << a.file << ": ok (" << map.speed_nodes() << "x" << map.torque_nodes()
              << " nodes, peak " << fmt("%.4f", map.max_value()) << ")\n";
    return 0;
  }
  const RunConfig c = load(g);
  for (const auto& [name, src] : selected_maps(c, a.mode)) {
    const EfficiencyMap map = src->build();
    std::cout << name << ": ok (" << map.speed_nodes() << "x" << map.torque_nodes()
              << " nodes, peak " << fmt("%.4f", map.max_value()) << ")\n";
  }
  return 0;
}

// ---- slope -----------------------------------------------------------------

struct SlopeArgs {
  std::optional<double> angle;
  std::optional<double> initial_speed;
  std::optional<double> vmin, vmax, step;
  std::optional<double> cargo;
};

std::vector<SlopeScenario> slope_scenarios(const RunConfig& c, const SlopeArgs& a) {
  std::vector<SlopeScenario> list;
  if (a.angle) {
    SlopeScenario s;
    s.slope_deg = *a.angle;
    list.push_back(s);
  } else {
    list = c.scenarios;
  }
  if (list.empty()) throw ConfigError("no slope scenarios: pass --angle or list them in the config");
  for (auto& s : list) {
    if (a.initial_speed) s.initial_speed_kmh = *a.initial_speed;
    if (a.cargo) s.cargo_kg = *a.cargo;
    s.validate();
  }
  return list;
}

SpeedGrid slope_grid(const RunConfig& c, const SlopeArgs& a) {
  SpeedGrid grid = c.grid;
  if (a.vmin) grid.vmin_kmh = *a.vmin;
  if (a.vmax) grid.vmax_kmh = *a.vmax;
  if (a.step) grid.step_kmh = *a.step;
  return grid;
}

void print_point(const SlopeScenario& s, DriveStateKind regime, const OperatingPoint& pt) {
  std::cout << "slope " << slope_tag(s.slope_deg) << " deg (" << to_string(regime) << "): optimum "
            << fmt("%.1f", pt.speed_kmh) << " km/h, " << fmt("%.2f", pt.energy_wh_per_km)
            << " Wh/km, " << fmt("%.1f", pt.torque_per_motor_nm) << " N*m per motor at "
            << fmt("%.0f", pt.rpm) << " rpm\n";
}

int cmd_slope(const GlobalOptions& g, const SlopeArgs& a, bool full_sweep) {
  const RunConfig c = load(g);
  const DriveModel model = c.iwm_model();
  const auto scenarios = slope_scenarios(c, a);
  const SpeedGrid grid = slope_grid(c, a);

  struct Result {
    SpeedSweep sweep;
    OperatingPoint best;
  };
  const auto results = run_indexed<Result>(scenarios.size(), g.parallel, [&](std::size_t i) {
    SpeedSweep sweep = model.sweep_speeds(scenarios[i], grid);
    const OperatingPoint best = model.optimal_speed(scenarios[i], grid);
    return Result{std::move(sweep), best};
  });

  json report = report_header(full_sweep ? "slope_sweep" : "slope_optimum", c);
  report["grid"] = {{"vmin_kmh", grid.vmin_kmh},
                    {"vmax_kmh", grid.vmax_kmh},
                    {"step_kmh", grid.step_kmh},
                    {"refine_step_kmh", grid.refine_step_kmh}};
  report["scenarios"] = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    json entry = to_json(r.sweep);
    entry["refined_optimum"] = to_json(r.best);
    if (full_sweep) {
      const fs::path curve = c.output_dir / ("curve_slope" + slope_tag(scenarios[i].slope_deg) + ".csv");
      emit_curve(r.sweep, curve);
      entry["curve_file"] = curve.filename().generic_string();  // relative to the report
    }
    report["scenarios"].push_back(entry);
    print_point(scenarios[i], r.sweep.regime, r.best);
  }
  emit_report(report, c.output_dir / (full_sweep ? "slope_sweep.json" : "slope_optimum.json"));
  return 0;
}

// ---- cycle -----------------------------------------------------------------

struct CycleArgs {
  std::string cycle;
  std::string unit = "mph";
  bool baseline = false;
  double grade = 0.0;
};

int cmd_cycle_run(const GlobalOptions& g, const CycleArgs& a) {
  const RunConfig c = load(g);
  std::vector<CycleEntry> entries;
  if (!a.cycle.empty()) {
    entries.push_back({a.cycle, speed_unit_from_string(a.unit)});
  } else {
    entries = c.cycles;
  }
  if (entries.empty()) throw ConfigError("no cycles: pass --cycle or list them in the config");

  const MotorMaps maps = c.build_maps();
  const EfficiencyMap baseline_map = c.baseline_map.build();
  CycleOptions opts;
  opts.grade_deg = a.grade;

  struct Result {
    CycleResult iwm;
    std::optional<CycleResult> base;
  };
  const auto results = run_indexed<Result>(entries.size(), g.parallel, [&](std::size_t i) {
    const DrivingCycle cycle = load_cycle(entries[i].file, entries[i].unit);
    Result r{simulate_cycle(cycle, c.vehicle, c.environment, maps, c.regen, opts), std::nullopt};
    if (a.baseline) {
      r.base = simulate_baseline_cycle(cycle, c.baseline_vehicle, c.environment, baseline_map,
                                       c.regen, opts);
    }
    return r;
  });

  json report = report_header("cycle_run", c);
  report["grade_deg"] = a.grade;
  report["cycles"] = json::array();
  for (const auto& r : results) {
    json entry = {{"iwm", to_json(r.iwm)}};
    std::cout << r.iwm.cycle_name << ": " << fmt("%.1f", r.iwm.unit_energy_wh_per_km)
              << " Wh/km over " << fmt("%.2f", r.iwm.distance_km) << " km, SSCM share "
              << fmt("%.1f", 100.0 * r.iwm.sscm_share) << "%";
    if (r.base) {
      entry["baseline"] = to_json(*r.base);
      entry["iwm_to_baseline"] = r.iwm.unit_energy_wh_per_km / r.base->unit_energy_wh_per_km;
      std::cout << "; baseline " << fmt("%.1f", r.base->unit_energy_wh_per_km) << " Wh/km (ratio "
                << fmt("%.3f", r.iwm.unit_energy_wh_per_km / r.base->unit_energy_wh_per_km) << ")";
    }
    if (r.iwm.clamped_steps > 0) std::cout << "; " << r.iwm.clamped_steps << " steps clamped";
    std::cout << "\n";
    report["cycles"].push_back(entry);
  }
  emit_report(report, c.output_dir / "cycle_run.json");
  return 0;
}

// ---- casestudy / config ----------------------------------------------------

int cmd_casestudy(const GlobalOptions& g) {
  const RunConfig c = load(g);
  const CaseStudyReport r = run_case_study(c.case_study, c.iwm_model(), c.baseline_model());
  const SscmTotals sscm = sscm_aggregate(c.sscm_components);
  json report = report_header("casestudy", c);
  report["case_study"] = to_json(r);
  report["sscm"] = {{"power_w", sscm.power_w}, {"mass_kg", sscm.mass_kg}};
  emit_report(report, c.output_dir / "casestudy.json");

  std::cout << "upslope   " << fmt("%.1f", r.iwm_upslope.speed_kmh) << " km/h, "
            << fmt("%.1f", r.iwm_upslope.energy_wh_per_km) << " Wh/km\n"
            << "downslope " << fmt("%.1f", r.iwm_downslope.speed_kmh) << " km/h, "
            << fmt("%.1f", r.iwm_downslope.energy_wh_per_km) << " Wh/km ("
            << to_string(r.iwm_downslope.state) << ")\n"
            << "average   " << fmt("%.1f", r.iwm_average_wh_per_km) << " Wh/km\n"
            << "baseline  " << fmt("%.1f", r.baseline_raw_wh_per_km) << " -> "
            << fmt("%.1f", r.baseline_adjusted_wh_per_km) << " Wh/km adjusted\n"
            << "savings   " << fmt("%.1f", 100.0 * r.savings) << "%\n";
  return 0;
}

int cmd_config_validate(const GlobalOptions& g) {
  const RunConfig c = load(g);
  std::cout << "config ok: " << c.scenarios.size() << " slope scenarios, " << c.cycles.size()
            << " cycles\n"
            << "motoring map " << c.motoring_map.fingerprint() << "\n"
            << "braking map  " << c.braking_map.fingerprint() << "\n"
            << "baseline map " << c.baseline_map.fingerprint() << "\n";
  return 0;
}

int cmd_config_show(const GlobalOptions& g) {
  std::cout << config_to_json(load(g)).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-wheel-motor EV energy simulator"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON config file (falls back to $WHEELSIM_CONFIG)");
  app.add_option("--out", g.out, "Output directory for reports and curves");
  app.add_option("--params", g.params, "Config override KEY=VALUE (dotted keys), repeatable")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--parallel", g.parallel, "Worker threads for independent scenarios")
      ->check(CLI::Range(1u, 256u));
  app.fallthrough();

  std::function<int()> action;

  auto* map = app.add_subcommand("map", "Efficiency map tools");
  map->require_subcommand(1);
  MapArgs map_args;
  auto add_map_flags = [&](CLI::App* cmd, bool with_file) {
    cmd->add_option("--mode", map_args.mode, "motoring|braking|baseline|all");
    if (with_file) cmd->add_option("--file", map_args.file, "Map CSV instead of the configured maps");
    cmd->add_option("--threshold", map_args.threshold, "Efficiency threshold for the area statistic");
  };
  auto* map_synth = map->add_subcommand("synth", "Write the configured maps as CSV");
  add_map_flags(map_synth, false);
  map_synth->callback([&] { action = [&] { return cmd_map_synth(g, map_args); }; });
  auto* map_stats = map->add_subcommand("stats", "Peak, floor and area statistics");
  add_map_flags(map_stats, true);
  map_stats->callback([&] { action = [&] { return cmd_map_stats(g, map_args); }; });
  auto* map_validate = map->add_subcommand("validate", "Check a map CSV or the configured maps");
  add_map_flags(map_validate, true);
  map_validate->callback([&] { action = [&] { return cmd_map_validate(g, map_args); }; });

  auto* slope = app.add_subcommand("slope", "Constant-speed driving on a grade");
  slope->require_subcommand(1);
  SlopeArgs slope_args;
  auto add_slope_flags = [&](CLI::App* cmd) {
    cmd->add_option("--angle", slope_args.angle, "Slope in degrees, negative downhill");
    cmd->add_option("--initial-speed", slope_args.initial_speed, "Speed for the drive-state drag benchmark, km/h");
    cmd->add_option("--vmin", slope_args.vmin, "Lowest swept speed, km/h");
    cmd->add_option("--vmax", slope_args.vmax, "Highest swept speed, km/h");
    cmd->add_option("--step", slope_args.step, "Sweep step, km/h");
    cmd->add_option("--cargo", slope_args.cargo, "Cargo mass, kg");
  };
  auto* sweep = slope->add_subcommand("sweep", "Energy curve over speed; writes curve CSVs");
  add_slope_flags(sweep);
  sweep->callback([&] { action = [&] { return cmd_slope(g, slope_args, true); }; });
  auto* optimum = slope->add_subcommand("optimum", "Most economical constant speed");
  add_slope_flags(optimum);
  optimum->callback([&] { action = [&] { return cmd_slope(g, slope_args, false); }; });

  auto* cycle = app.add_subcommand("cycle", "Drive-cycle simulation");
  cycle->require_subcommand(1);
  CycleArgs cycle_args;
  auto* cycle_run = cycle->add_subcommand("run", "Unit energy over a speed trace");
  cycle_run->add_option("--cycle", cycle_args.cycle, "Cycle CSV (time_s,speed); default: configured cycles");
  cycle_run->add_option("--unit", cycle_args.unit, "Speed unit of --cycle: mph|kmh");
  cycle_run->add_flag("--baseline", cycle_args.baseline, "Also run the geared baseline car");
  cycle_run->add_option("--grade", cycle_args.grade, "Constant grade, degrees");
  cycle_run->callback([&] { action = [&] { return cmd_cycle_run(g, cycle_args); }; });

  auto* casestudy = app.add_subcommand("casestudy", "Round trip over a shallow grade vs the baseline car");
  casestudy->callback([&] { action = [&] { return cmd_casestudy(g); }; });

  auto* config = app.add_subcommand("config", "Configuration tools");
  config->require_subcommand(1);
  config->add_subcommand("validate", "Load and check the configuration")
      ->callback([&] { action = [&] { return cmd_config_validate(g); }; });
  config->add_subcommand("show", "Print the effective configuration as JSON")
      ->callback([&] { action = [&] { return cmd_config_show(g); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return static_cast<int>(ExitCode::kUsage);
  }

  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kUsage);
  }
}
