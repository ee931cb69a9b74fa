#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wheelsim/case_study.hpp"
#include "wheelsim/config.hpp"
#include "wheelsim/error.hpp"
#include "wheelsim/report.hpp"

using namespace wheelsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kData = WHEELSIM_TEST_DATA_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "wheelsim_runner_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Sscm, TableTotals) {
  const auto t = sscm_aggregate(default_sscm_components());
  // Row arithmetic: 16 + 9 + 14.7 + 0.416 + 1.8 + 2.1 + 196.
  EXPECT_NEAR(t.power_w, 16 + 9 + 14.7 + 0.416 + 1.8 + 2.1 + 196, 1e-9);
  EXPECT_NEAR(t.power_w, 240.0, 0.5);
  EXPECT_NEAR(t.mass_kg, 1.66 + 0.48 + 0.315 + 0.16 + 0.51 + 0.01 + 10.15 + 5.7, 1e-9);
  EXPECT_NEAR(t.mass_kg, 19.0, 0.1);
}

TEST(Sscm, EmptyAndInvariants) {
  const auto empty = sscm_aggregate({});
  EXPECT_EQ(empty.power_w, 0.0);
  EXPECT_EQ(empty.mass_kg, 0.0);

  auto rows = default_sscm_components();
  const auto base = sscm_aggregate(rows);
  std::mt19937 rng(1);
  std::shuffle(rows.begin(), rows.end(), rng);
  EXPECT_NEAR(sscm_aggregate(rows).power_w, base.power_w, 1e-9);
  EXPECT_NEAR(sscm_aggregate(rows).mass_kg, base.mass_kg, 1e-9);

  auto doubled = default_sscm_components();
  const double lidar_power = doubled[0].power_w;
  doubled[0].count *= 2;
  EXPECT_NEAR(sscm_aggregate(doubled).power_w, base.power_w + 2 * lidar_power, 1e-9);

  doubled[0].mass_kg = -1;
  EXPECT_THROW(sscm_aggregate(doubled), ConfigError);
}

TEST(AdjustBaseline, Values) {
  const double adjusted = adjust_baseline(157.9, {});
  EXPECT_NEAR(adjusted, 157.9 * (1 - 0.269), 1e-9);
  EXPECT_NEAR(adjusted, 116.8, 0.02 * 116.8);
  EXPECT_EQ(adjust_baseline(157.9, {0, 0, 0}), 157.9);
  EXPECT_THROW(adjust_baseline(157.9, {0.5, 0.3, 0.2}), DomainError);
  EXPECT_THROW(adjust_baseline(157.9, {-0.1, 0, 0}), DomainError);
}

TEST(AdjustBaseline, MonotoneInEachShare) {
  const BaselineShares s;
  const double a = adjust_baseline(100, s);
  EXPECT_LT(adjust_baseline(100, {s.acceleration + 0.01, s.auxiliary, s.driver}), a);
  EXPECT_LT(adjust_baseline(100, {s.acceleration, s.auxiliary + 0.01, s.driver}), a);
  EXPECT_LT(adjust_baseline(100, {s.acceleration, s.auxiliary, s.driver + 0.01}), a);
}

TEST(CaseStudy, DefaultRun) {
  const RunConfig c = RunConfig::defaults();
  const auto r = run_case_study(c.case_study, c.iwm_model(), c.baseline_model());
  EXPECT_NEAR(r.iwm_average_wh_per_km,
              0.5 * (r.iwm_upslope.energy_wh_per_km + r.iwm_downslope.energy_wh_per_km), 1e-12);
  EXPECT_NEAR(r.savings, 1 - r.iwm_average_wh_per_km / r.baseline_adjusted_wh_per_km, 1e-15);
  EXPECT_EQ(r.iwm_downslope.state, DriveStateKind::kMotoring);
  EXPECT_GT(r.baseline_sim_with_driver_wh_per_km, r.baseline_sim_without_driver_wh_per_km);
  EXPECT_GE(r.savings, 0.12);
  EXPECT_LE(r.savings, 0.25);
}

TEST(CaseStudy, UnequalLegsWeightByDistance) {
  RunConfig c = RunConfig::defaults();
  // Equal legs are the only case the config exposes; check the weighting by
  // comparing against the per-leg energies directly.
  c.case_study.leg_distance_km = 10.0;
  const auto r = run_case_study(c.case_study, c.iwm_model(), c.baseline_model());
  EXPECT_NEAR(r.iwm_average_wh_per_km,
              (10 * r.iwm_upslope.energy_wh_per_km + 10 * r.iwm_downslope.energy_wh_per_km) / 20, 1e-12);
}

TEST(CaseStudy, BadConfig) {
  RunConfig c = RunConfig::defaults();
  c.case_study.leg_distance_km = 0;
  EXPECT_THROW(run_case_study(c.case_study, c.iwm_model(), c.baseline_model()), ConfigError);
  c = RunConfig::defaults();
  c.case_study.shares = {0.6, 0.3, 0.2};
  EXPECT_THROW(run_case_study(c.case_study, c.iwm_model(), c.baseline_model()), DomainError);
}

TEST(Config, DefaultsRoundTripThroughJson) {
  const RunConfig c = RunConfig::defaults();
  const RunConfig back = parse_config(config_to_json(c).dump());
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, ShippedDefaultFileMatchesBuiltIns) {
  const RunConfig file = load_config(kData + "/config/default.json");
  const RunConfig builtin = RunConfig::defaults();
  EXPECT_EQ(file.motoring_map.fingerprint(), builtin.motoring_map.fingerprint());
  EXPECT_EQ(file.braking_map.fingerprint(), builtin.braking_map.fingerprint());
  EXPECT_EQ(file.baseline_map.fingerprint(), builtin.baseline_map.fingerprint());
  EXPECT_EQ(to_json(file.vehicle), to_json(builtin.vehicle));
  ASSERT_EQ(file.cycles.size(), 2u);
  EXPECT_TRUE(fs::exists(file.cycles[0].file));
}

TEST(Config, PartialFileKeepsDefaults) {
  const auto c = parse_config(R"({"vehicle": {"mass_kg": 1500}, "scenarios": [{"slope_deg": 2}]})");
  EXPECT_EQ(c.vehicle.mass_kg, 1500.0);
  EXPECT_EQ(c.vehicle.drag_coeff, 0.29);
  ASSERT_EQ(c.scenarios.size(), 1u);
  EXPECT_EQ(c.scenarios[0].slope_deg, 2.0);
  EXPECT_EQ(c.scenarios[0].initial_speed_kmh, 30.0);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config(R"({"vehicle": {"mass": 1500}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"vehicle": {"mass_kg": "heavy"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"vehicle": {"mass_kg": -3}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"schema_version": 9})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenarios": [], "cycles": []})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"maps": {"motoring": {}}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"maps": {"motoring": {"file": "a.csv", "synth": {}}}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"strategy": {"classifier_speed": "fastest"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"vehicle": )"), ParseError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

TEST(Config, MapFromFile) {
  const auto path = scratch("motoring.csv");
  save_map(synthesize_motoring_map(), path);
  const json j = {{"maps", {{"motoring", {{"file", path.filename().string()}}}}}};
  const auto c = parse_config(j.dump(), "mem", path.parent_path());
  EXPECT_EQ(c.motoring_map.build(), synthesize_motoring_map());
  EXPECT_EQ(c.motoring_map.fingerprint().rfind("file:", 0), 0u);
}

TEST(Overrides, DottedKeys) {
  json j = config_to_json(RunConfig::defaults());
  apply_overrides(j, {"vehicle.mass_kg=1500", "scenarios.0.slope_deg=2.5", "output_dir=somewhere",
                      "regen.chain_eff=0.7"});
  const auto c = parse_config(j.dump());
  EXPECT_EQ(c.vehicle.mass_kg, 1500.0);
  EXPECT_EQ(c.scenarios[0].slope_deg, 2.5);
  EXPECT_EQ(c.output_dir, fs::path("somewhere"));
  EXPECT_EQ(c.regen.chain_eff.value(), 0.7);

  EXPECT_THROW(apply_overrides(j, {"novalue"}), ConfigError);
  EXPECT_THROW(apply_overrides(j, {"scenarios.99.slope_deg=1"}), ConfigError);
  EXPECT_THROW(apply_overrides(j, {"vehicle.mass_kg.x=1"}), ConfigError);
  json k = config_to_json(RunConfig::defaults());
  apply_overrides(k, {"vehicle.typo_kg=1"});
  EXPECT_THROW(parse_config(k.dump()), ConfigError);
}

TEST(Overrides, EnvironmentFallback) {
  const auto path = scratch("env_config.json");
  {
    std::ofstream out(path);
    out << R"({"vehicle": {"mass_kg": 1450}})";
  }
  ::setenv("WHEELSIM_CONFIG", path.c_str(), 1);
  EXPECT_EQ(resolve_config_path(std::nullopt).value(), path);
  EXPECT_EQ(resolve_config_path(fs::path("x.json")).value(), fs::path("x.json"));
  EXPECT_EQ(load_run_config(resolve_config_path(std::nullopt)).vehicle.mass_kg, 1450.0);
  EXPECT_EQ(load_run_config(resolve_config_path(std::nullopt), {"vehicle.mass_kg=1460"}).vehicle.mass_kg, 1460.0);
  ::unsetenv("WHEELSIM_CONFIG");
  EXPECT_FALSE(resolve_config_path(std::nullopt).has_value());
}

TEST(Report, DeterministicAndRoundTrips) {
  const RunConfig c = RunConfig::defaults();
  const auto r = run_case_study(c.case_study, c.iwm_model(), c.baseline_model());
  json report = report_header("casestudy", c);
  report["case_study"] = to_json(r);
  const auto a = scratch("a.json"), b = scratch("b.json");
  emit_report(report, a);
  const auto r2 = run_case_study(c.case_study, c.iwm_model(), c.baseline_model());
  json again = report_header("casestudy", c);
  again["case_study"] = to_json(r2);
  emit_report(again, b);
  EXPECT_EQ(slurp(a), slurp(b));

  const json back = read_report(a);
  EXPECT_EQ(back["map_fingerprints"]["motoring"], c.motoring_map.fingerprint());
  const auto parsed = case_study_from_json(back["case_study"]);
  EXPECT_EQ(parsed.iwm_average_wh_per_km, r.iwm_average_wh_per_km);
  EXPECT_EQ(parsed.iwm_upslope.speed_kmh, r.iwm_upslope.speed_kmh);
  EXPECT_EQ(parsed.iwm_downslope.state, r.iwm_downslope.state);
  EXPECT_EQ(parsed.savings, r.savings);
}

TEST(Report, CycleAndPointRoundTrip) {
  const RunConfig c = RunConfig::defaults();
  const auto cycle = load_cycle(c.cycles[0].file, c.cycles[0].unit);
  const auto r = simulate_cycle(cycle, c.vehicle, c.environment, c.build_maps());
  const auto back = cycle_result_from_json(parse_report(report_text(json{{"schema_version", 1}, {"kind", "x"}, {"r", to_json(r)}}))["r"]);
  EXPECT_EQ(back.unit_energy_wh_per_km, r.unit_energy_wh_per_km);
  EXPECT_EQ(back.clamped_steps, r.clamped_steps);

  const auto model = c.iwm_model();
  SlopeScenario s;
  s.slope_deg = 3;
  const auto pt = model.evaluate(200.0 * 0.9, s);
  const auto pt_back = operating_point_from_json(json::parse(to_json(pt).dump()));
  EXPECT_EQ(pt_back.feasible, pt.feasible);
  EXPECT_EQ(pt_back.violation, pt.violation);
  EXPECT_EQ(pt_back.speed_kmh, pt.speed_kmh);
}

TEST(Report, ReaderRejectsForeignJson) {
  EXPECT_THROW(parse_report("{}"), ParseError);
  EXPECT_THROW(parse_report(R"({"schema_version": 7, "kind": "x"})"), ParseError);
  EXPECT_THROW(parse_report(R"({"schema_version": 1})"), ParseError);
  EXPECT_THROW(parse_report("[1,"), ParseError);
  EXPECT_THROW(read_report("/nonexistent/report.json"), IoError);
}

TEST(Curve, OneRowPerGridPoint) {
  const RunConfig c = RunConfig::defaults();
  SlopeScenario s;
  s.slope_deg = -3.0;
  SpeedGrid g;
  g.vmax_kmh = 190.0;
  const auto sweep = c.iwm_model().sweep_speeds(s, g);
  const std::string csv = curve_csv(sweep);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), sweep.points.size() + 1);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "speed_kmh,rpm,torque_nm,eta,energy_wh_per_km,feasible");
  EXPECT_NE(csv.find(",,0\n"), std::string::npos);  // infeasible rows leave energy empty
  const auto path = scratch("curve.csv");
  emit_curve(sweep, path);
  EXPECT_EQ(slurp(path), csv);
  EXPECT_THROW(emit_curve(sweep, "/proc/definitely/not/writable.csv"), IoError);
}
