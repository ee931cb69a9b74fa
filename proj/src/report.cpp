#include "wheelsim/report.hpp"

#include <cmath>
#include <limits>

#include "text_util.hpp"
#include "wheelsim/error.hpp"

namespace wheelsim {

using nlohmann::json;

namespace {

// JSON has no NaN; infeasible energies travel as null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j, const char* key) {
  const json& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

DriveStateKind state_from_string(const std::string& s) {
  if (s == "motoring") return DriveStateKind::kMotoring;
  if (s == "balanced") return DriveStateKind::kBalanced;
  if (s == "braking") return DriveStateKind::kBraking;
  throw ParseError("unknown drive state '" + s + "'");
}

Violation violation_from_string(const std::string& s) {
  if (s.empty()) return Violation::kNone;
  if (s == "speed_limit") return Violation::kSpeedLimit;
  if (s == "torque_limit") return Violation::kTorqueLimit;
  if (s == "regime_mismatch") return Violation::kRegimeMismatch;
  throw ParseError("unknown violation '" + s + "'");
}

json leg_json(const LegResult& leg) {
  return {{"speed_kmh", leg.speed_kmh},
          {"energy_wh_per_km", leg.energy_wh_per_km},
          {"state", std::string(to_string(leg.state))}};
}

LegResult leg_from(const json& j) {
  return {j.at("speed_kmh").get<double>(), j.at("energy_wh_per_km").get<double>(),
          state_from_string(j.at("state").get<std::string>())};
}

}  // namespace

json report_header(std::string_view kind, const RunConfig& config) {
  return {{"schema_version", kReportSchemaVersion},
          {"kind", std::string(kind)},
          {"map_fingerprints",
           {{"motoring", config.motoring_map.fingerprint()},
            {"braking", config.braking_map.fingerprint()},
            {"baseline", config.baseline_map.fingerprint()}}}};
}

json to_json(const OperatingPoint& pt) {
  return {{"speed_kmh", pt.speed_kmh},
          {"rpm", pt.rpm},
          {"torque_per_motor_nm", pt.torque_per_motor_nm},
          {"total_torque_nm", pt.total_torque_nm},
          {"motor_efficiency", pt.motor_efficiency},
          {"energy_factor_nm", pt.energy_factor},
          {"energy_wh_per_km", number_or_null(pt.energy_wh_per_km)},
          {"state", std::string(to_string(pt.state))},
          {"feasible", pt.feasible},
          {"violation", std::string(to_string(pt.violation))}};
}

OperatingPoint operating_point_from_json(const json& j) {
  try {
    OperatingPoint pt;
    pt.speed_kmh = j.at("speed_kmh").get<double>();
    pt.rpm = j.at("rpm").get<double>();
    pt.torque_per_motor_nm = j.at("torque_per_motor_nm").get<double>();
    pt.total_torque_nm = j.at("total_torque_nm").get<double>();
    pt.motor_efficiency = j.at("motor_efficiency").get<double>();
    pt.energy_factor = j.at("energy_factor_nm").get<double>();
    pt.energy_wh_per_km = number_from(j, "energy_wh_per_km");
    pt.state = state_from_string(j.at("state").get<std::string>());
    pt.feasible = j.at("feasible").get<bool>();
    pt.violation = violation_from_string(j.at("violation").get<std::string>());
    return pt;
  } catch (const json::exception& e) {
    throw ParseError(std::string("operating point: ") + e.what());
  }
}

json to_json(const SpeedSweep& sweep) {
  const auto& s = sweep.scenario;
  std::size_t feasible = 0;
  for (const auto& pt : sweep.points) feasible += pt.feasible ? 1 : 0;
  return {{"scenario",
           {{"slope_deg", s.slope_deg},
            {"initial_speed_kmh", s.initial_speed_kmh},
            {"distance_km", s.distance_km},
            {"cargo_kg", s.cargo_kg},
            {"accel_m_s2", s.accel_m_s2}}},
          {"regime", std::string(to_string(sweep.regime))},
          {"points", sweep.points.size()},
          {"feasible_points", feasible},
          {"optimum", to_json(sweep.optimum())}};
}

json to_json(const CycleResult& r) {
  return {{"cycle", r.cycle_name},
          {"unit_energy_wh_per_km", r.unit_energy_wh_per_km},
          {"traction_share", r.traction_share},
          {"sscm_share", r.sscm_share},
          {"regen_recovered_wh_per_km", r.regen_recovered_wh_per_km},
          {"distance_km", r.distance_km},
          {"duration_s", r.duration_s},
          {"traction_wh", r.traction_wh},
          {"regen_wh", r.regen_wh},
          {"sscm_wh", r.sscm_wh},
          {"clamped_steps", r.clamped_steps}};
}

CycleResult cycle_result_from_json(const json& j) {
  try {
    CycleResult r;
    r.cycle_name = j.at("cycle").get<std::string>();
    r.unit_energy_wh_per_km = j.at("unit_energy_wh_per_km").get<double>();
    r.traction_share = j.at("traction_share").get<double>();
    r.sscm_share = j.at("sscm_share").get<double>();
    r.regen_recovered_wh_per_km = j.at("regen_recovered_wh_per_km").get<double>();
    r.distance_km = j.at("distance_km").get<double>();
    r.duration_s = j.at("duration_s").get<double>();
    r.traction_wh = j.at("traction_wh").get<double>();
    r.regen_wh = j.at("regen_wh").get<double>();
    r.sscm_wh = j.at("sscm_wh").get<double>();
    r.clamped_steps = j.at("clamped_steps").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("cycle result: ") + e.what());
  }
}

json to_json(const CaseStudyReport& r) {
  return {{"baseline_raw_wh_per_km", r.baseline_raw_wh_per_km},
          {"baseline_adjusted_wh_per_km", r.baseline_adjusted_wh_per_km},
          {"removal_shares",
           {{"acceleration", r.shares.acceleration},
            {"auxiliary", r.shares.auxiliary},
            {"driver", r.shares.driver}}},
          {"iwm_upslope", leg_json(r.iwm_upslope)},
          {"iwm_downslope", leg_json(r.iwm_downslope)},
          {"iwm_average_wh_per_km", r.iwm_average_wh_per_km},
          {"savings", r.savings},
          {"baseline_sim_with_driver_wh_per_km", r.baseline_sim_with_driver_wh_per_km},
          {"baseline_sim_without_driver_wh_per_km", r.baseline_sim_without_driver_wh_per_km},
          {"savings_vs_sim", r.savings_vs_sim}};
}

CaseStudyReport case_study_from_json(const json& j) {
  try {
    CaseStudyReport r;
    r.baseline_raw_wh_per_km = j.at("baseline_raw_wh_per_km").get<double>();
    r.baseline_adjusted_wh_per_km = j.at("baseline_adjusted_wh_per_km").get<double>();
    const json& sh = j.at("removal_shares");
    r.shares = {sh.at("acceleration").get<double>(), sh.at("auxiliary").get<double>(),
                sh.at("driver").get<double>()};
    r.iwm_upslope = leg_from(j.at("iwm_upslope"));
    r.iwm_downslope = leg_from(j.at("iwm_downslope"));
    r.iwm_average_wh_per_km = j.at("iwm_average_wh_per_km").get<double>();
    r.savings = j.at("savings").get<double>();
    r.baseline_sim_with_driver_wh_per_km = j.at("baseline_sim_with_driver_wh_per_km").get<double>();
    r.baseline_sim_without_driver_wh_per_km =
        j.at("baseline_sim_without_driver_wh_per_km").get<double>();
    r.savings_vs_sim = j.at("savings_vs_sim").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("case study report: ") + e.what());
  }
}

std::string report_text(const json& report) { return report.dump(2) + "\n"; }

void emit_report(const json& report, const std::filesystem::path& path) {
  detail::write_file(path, report_text(report));
}

json parse_report(std::string_view text, std::string_view source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(source) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw ParseError(std::string(source) + ": not a report (missing schema_version)");
  }
  if (j["schema_version"].get<int>() != kReportSchemaVersion) {
    throw ParseError(std::string(source) + ": unsupported report schema_version " +
                     j["schema_version"].dump());
  }
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ParseError(std::string(source) + ": report has no 'kind'");
  }
  return j;
}

json read_report(const std::filesystem::path& path) {
  return parse_report(detail::read_file(path), path.string());
}

std::string curve_csv(const SpeedSweep& sweep) {
  using detail::format_double;
  std::string out = "speed_kmh,rpm,torque_nm,eta,energy_wh_per_km,feasible\n";
  for (const auto& pt : sweep.points) {
    out += format_double(pt.speed_kmh) + ',' + format_double(pt.rpm) + ',' +
           format_double(pt.torque_per_motor_nm) + ',' + format_double(pt.motor_efficiency) + ',' +
           (pt.feasible ? format_double(pt.energy_wh_per_km) : std::string()) + ',' +
           (pt.feasible ? "1" : "0") + '\n';
  }
  return out;
}

void emit_curve(const SpeedSweep& sweep, const std::filesystem::path& path) {
  detail::write_file(path, curve_csv(sweep));
}

}  // namespace wheelsim
