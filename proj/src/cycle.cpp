#include "wheelsim/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "text_util.hpp"
#include "wheelsim/error.hpp"
#include "wheelsim/units.hpp"

namespace wheelsim {

std::string_view to_string(SpeedUnit unit) { return unit == SpeedUnit::kKmh ? "kmh" : "mph"; }

SpeedUnit speed_unit_from_string(std::string_view name) {
  if (name == "kmh") return SpeedUnit::kKmh;
  if (name == "mph") return SpeedUnit::kMph;
  throw ConfigError("unknown speed unit '" + std::string(name) + "' (expected mph|kmh)");
}

void DrivingCycle::validate() const {
  if (samples.size() < 2) {
    throw ParseError("cycle '" + name + "' needs at least 2 samples, has " +
                     std::to_string(samples.size()));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].speed_kmh >= 0.0)) {
      throw ParseError("cycle '" + name + "': negative speed at sample " + std::to_string(i));
    }
    if (i > 0 && !(samples[i].time_s > samples[i - 1].time_s)) {
      throw ParseError("cycle '" + name + "': time not strictly increasing at sample " +
                       std::to_string(i));
    }
  }
}

DrivingCycle parse_cycle(std::string_view text, SpeedUnit unit, std::string name,
                         std::string_view source) {
  auto fail = [source](std::size_t line, const std::string& what) {
    throw ParseError(std::string(source) + ": line " + std::to_string(line) + ": " + what);
  };
  const auto rows = detail::lines(text);
  if (rows.empty()) fail(1, "empty file");
  const auto header = detail::split(rows[0]);
  if (header.size() != 2 || header[0] != "time_s" || header[1] != "speed") {
    fail(1, "header must be 'time_s,speed'");
  }

  DrivingCycle cycle;
  cycle.name = std::move(name);
  cycle.source_unit = unit;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t line = r + 1;
    if (detail::trim(rows[r]).empty()) continue;
    const auto cells = detail::split(rows[r]);
    if (cells.size() != 2) fail(line, "expected 2 columns, found " + std::to_string(cells.size()));
    const auto t = detail::parse_double(cells[0]);
    const auto v = detail::parse_double(cells[1]);
    if (!t) fail(line, "time '" + std::string(cells[0]) + "' is not a number");
    if (!v) fail(line, "speed '" + std::string(cells[1]) + "' is not a number");
    if (*v < 0.0) fail(line, "negative speed " + std::string(cells[1]));
    if (!cycle.samples.empty() && !(*t > cycle.samples.back().time_s)) {
      fail(line, "time " + std::string(cells[0]) + " does not increase");
    }
    cycle.samples.push_back({*t, unit == SpeedUnit::kMph ? units::mph_to_kmh(*v) : *v});
  }
  if (cycle.samples.size() < 2) {
    fail(rows.size(), "need at least 2 samples, found " + std::to_string(cycle.samples.size()));
  }
  return cycle;
}

DrivingCycle load_cycle(const std::filesystem::path& path, SpeedUnit unit) {
  return parse_cycle(detail::read_file(path), unit, path.stem().string(), path.string());
}

double cycle_distance(const DrivingCycle& cycle) {
  double meters = 0.0;
  for (std::size_t i = 1; i < cycle.samples.size(); ++i) {
    const auto& a = cycle.samples[i - 1];
    const auto& b = cycle.samples[i];
    meters += 0.5 * (units::kmh_to_ms(a.speed_kmh) + units::kmh_to_ms(b.speed_kmh)) *
              (b.time_s - a.time_s);
  }
  return meters / 1000.0;
}

void RegenPolicy::validate() const {
  if (!(recovery_fraction >= 0.0 && recovery_fraction <= 1.0)) {
    throw ConfigError("regen recovery_fraction must be in [0, 1]");
  }
  if (chain_eff && !(*chain_eff > 0.0 && *chain_eff <= 1.0)) {
    throw ConfigError("regen chain_eff must be in (0, 1]");
  }
}

namespace {

// Clamps (rpm, torque) onto the map; returns true when clamping was needed.
bool clamp_to_map(const EfficiencyMap& map, double& rpm, double& torque) {
  const double r = std::clamp(rpm, 0.0, map.max_rpm());
  const double t = std::clamp(torque, 0.0, map.max_torque_nm());
  const bool clamped = r != rpm || t != torque;
  rpm = r;
  torque = t;
  return clamped;
}

}  // namespace

CycleResult simulate_cycle(const DrivingCycle& cycle, const VehicleParams& params,
                           const Environment& env, const MotorMaps& maps,
                           const RegenPolicy& policy, const CycleOptions& options) {
  cycle.validate();
  params.validate();
  env.validate();
  policy.validate();

  CycleResult result;
  result.cycle_name = cycle.name;
  result.distance_km = cycle_distance(cycle);
  result.duration_s = cycle.duration_s();
  if (!(result.distance_km > 0.0)) {
    throw DomainError("cycle '" + cycle.name + "' covers zero distance; unit energy is undefined");
  }

  double traction_j = 0.0;
  double regen_j = 0.0;
  for (std::size_t i = 1; i < cycle.samples.size(); ++i) {
    const auto& s0 = cycle.samples[i - 1];
    const auto& s1 = cycle.samples[i];
    const double dt = s1.time_s - s0.time_s;

    MotionState state;
    state.speed_kmh = 0.5 * (s0.speed_kmh + s1.speed_kmh);
    state.accel_m_s2 = units::kmh_to_ms(s1.speed_kmh - s0.speed_kmh) / dt;
    state.slope_deg = options.grade_deg;
    state.cargo_kg = options.cargo_kg;

    const double v_ms = units::kmh_to_ms(state.speed_kmh);
    const double inertial = acceleration_resistance(state, params);
    const double force = inertial + slope_resistance(state, params, env) +
                         rolling_resistance(state, params, env) +
                         aero_resistance(state, params, env);

    CycleStep step;
    step.time_s = s0.time_s;
    step.speed_kmh = state.speed_kmh;
    step.accel_m_s2 = state.accel_m_s2;
    step.wheel_force_n = force;

    double rpm = wheel_rpm(state.speed_kmh, params.tire_radius_m);
    double torque = std::abs(force) * params.tire_radius_m / params.motor_count;
    if (force > 0.0) {
      step.clamped = clamp_to_map(maps.motoring, rpm, torque);
      step.motor_efficiency = motor_efficiency(maps.motoring, rpm, torque);
      const double joules = force * v_ms * dt / (params.traction_chain_eff() * step.motor_efficiency);
      traction_j += joules;
      step.traction_wh = units::j_to_wh(joules);
    } else if (force < 0.0 && state.accel_m_s2 < 0.0) {
      // Only the inertial share of the braking force is recoverable, and
      // never more than the net braking force itself.
      const double recoverable_n = std::min(std::abs(inertial), -force);
      double chain = 0.0;
      if (policy.chain_eff) {
        chain = *policy.chain_eff;
      } else {
        step.clamped = clamp_to_map(maps.braking, rpm, torque);
        step.motor_efficiency = motor_efficiency(maps.braking, rpm, torque);
        chain = step.motor_efficiency * params.recovery_chain_eff();
      }
      const double joules = policy.recovery_fraction * chain * recoverable_n * v_ms * dt;
      regen_j += joules;
      step.regen_wh = units::j_to_wh(joules);
    }
    if (step.clamped) ++result.clamped_steps;
    if (options.keep_trace) result.trace.push_back(step);
  }

  result.traction_wh = units::j_to_wh(traction_j);
  result.regen_wh = units::j_to_wh(regen_j);
  result.sscm_wh = units::j_to_wh(params.sscm_power_w * result.duration_s);
  const double total_wh = result.traction_wh - result.regen_wh + result.sscm_wh;
  result.unit_energy_wh_per_km = total_wh / result.distance_km;
  result.regen_recovered_wh_per_km = result.regen_wh / result.distance_km;
  if (total_wh != 0.0) {
    result.sscm_share = result.sscm_wh / total_wh;
    result.traction_share = (result.traction_wh - result.regen_wh) / total_wh;
  }
  return result;
}

CycleResult simulate_baseline_cycle(const DrivingCycle& cycle, const VehicleParams& baseline_params,
                                    const Environment& env, const EfficiencyMap& baseline_map,
                                    const RegenPolicy& policy, const CycleOptions& options) {
  VehicleParams params = baseline_params;
  params.sscm_power_w = 0.0;
  const MotorMaps maps{baseline_map, baseline_map};
  return simulate_cycle(cycle, params, env, maps, policy, options);
}

}  // namespace wheelsim
