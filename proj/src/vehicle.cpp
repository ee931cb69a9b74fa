#include "wheelsim/vehicle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wheelsim/error.hpp"
#include "wheelsim/units.hpp"

namespace wheelsim {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool is_fraction(double x) { return x > 0.0 && x <= 1.0; }

double moving_mass(const MotionState& state, const VehicleParams& params) {
  return params.mass_kg + state.cargo_kg;
}

}  // namespace

VehicleParams VehicleParams::baseline() {
  VehicleParams p;
  p.mass_kg = 1481.0;
  p.transmission_eff = 0.93;
  p.inverter_eff = 0.95;
  p.sscm_power_w = 0.0;
  p.motor_count = 1;
  return p;
}

void VehicleParams::validate() const {
  require(mass_kg > 0.0, "vehicle mass_kg must be > 0");
  require(rotating_mass_kg > 0.0, "vehicle rotating_mass_kg must be > 0");
  require(frontal_area_m2 > 0.0, "vehicle frontal_area_m2 must be > 0");
  require(tire_radius_m > 0.0, "vehicle tire_radius_m must be > 0");
  require(drag_coeff >= 0.0, "vehicle drag_coeff must be >= 0");
  require(rolling_coeff >= 0.0, "vehicle rolling_coeff must be >= 0");
  require(is_fraction(battery_charge_eff), "battery_charge_eff must be in (0, 1]");
  require(is_fraction(battery_discharge_eff), "battery_discharge_eff must be in (0, 1]");
  require(is_fraction(transmission_eff), "transmission_eff must be in (0, 1]");
  require(is_fraction(inverter_eff), "inverter_eff must be in (0, 1]");
  require(is_fraction(brake_recovery_rate), "brake_recovery_rate must be in (0, 1]");
  require(sscm_power_w >= 0.0, "sscm_power_w must be >= 0");
  require(max_motor_rpm > 0.0, "max_motor_rpm must be > 0");
  require(max_motor_torque_nm > 0.0, "max_motor_torque_nm must be > 0");
  require(motor_count >= 1, "motor_count must be >= 1");
}

void Environment::validate() const {
  require(air_density_kg_m3 > 0.0, "air_density_kg_m3 must be > 0");
  require(gravity_m_s2 > 0.0, "gravity_m_s2 must be > 0");
}

void MotionState::validate() const {
  if (!(speed_kmh >= 0.0)) throw DomainError("speed must be >= 0 km/h");
  if (!(std::abs(slope_deg) < 90.0)) throw DomainError("slope angle must be within (-90, 90) degrees");
  if (!(cargo_kg >= 0.0)) throw DomainError("cargo mass must be >= 0 kg");
}

std::string_view to_string(DriveStateKind kind) {
  switch (kind) {
    case DriveStateKind::kMotoring: return "motoring";
    case DriveStateKind::kBalanced: return "balanced";
    case DriveStateKind::kBraking: return "braking";
  }
  return "unknown";
}

double aero_resistance(const MotionState& state, const VehicleParams& params,
                       const Environment& env) {
  const double v = units::kmh_to_ms(state.speed_kmh);
  return 0.5 * params.drag_coeff * params.frontal_area_m2 * env.air_density_kg_m3 * v * v;
}

double rolling_resistance(const MotionState& state, const VehicleParams& params,
                          const Environment& env) {
  return moving_mass(state, params) * env.gravity_m_s2 *
         std::cos(units::deg_to_rad(state.slope_deg)) * params.rolling_coeff;
}

double slope_resistance(const MotionState& state, const VehicleParams& params,
                        const Environment& env) {
  return moving_mass(state, params) * env.gravity_m_s2 *
         std::sin(units::deg_to_rad(state.slope_deg));
}

double acceleration_resistance(const MotionState& state, const VehicleParams& params) {
  return (params.mass_kg + params.rotating_mass_kg + state.cargo_kg) * state.accel_m_s2;
}

double demand_torque(const MotionState& state, const VehicleParams& params,
                     const Environment& env) {
  const double force = acceleration_resistance(state, params) +
                       slope_resistance(state, params, env) +
                       rolling_resistance(state, params, env) + aero_resistance(state, params, env);
  return force * params.tire_radius_m;
}

QuadraticCoeffs quadratic_coeffs(double slope_deg, double accel_m_s2, const VehicleParams& params,
                                 const Environment& env, double cargo_kg) {
  const double theta = units::deg_to_rad(slope_deg);
  const double mass = params.mass_kg + cargo_kg;
  QuadraticCoeffs c;
  c.k = params.drag_coeff * params.frontal_area_m2 * (env.air_density_kg_m3 / 2.0) *
        params.tire_radius_m;
  c.b = ((params.mass_kg + params.rotating_mass_kg + cargo_kg) * accel_m_s2 +
         (std::sin(theta) + params.rolling_coeff * std::cos(theta)) * mass * env.gravity_m_s2) *
        params.tire_radius_m;
  return c;
}

double wheel_rpm(double speed_kmh, double tire_radius_m) {
  // v / (2 pi r) rev/m, scaled by 1000 m/km and 1/60 h/min.
  return speed_kmh / (0.12 * std::numbers::pi * tire_radius_m);
}

double speed_at_rpm(double rpm, double tire_radius_m) {
  return rpm * 0.12 * std::numbers::pi * tire_radius_m;
}

DriveStateKind classify_drive_state(const MotionState& state, const VehicleParams& params,
                                    const Environment& env) {
  if (state.slope_deg >= 0.0) return DriveStateKind::kMotoring;
  const double grade = std::abs(slope_resistance(state, params, env));
  const double resist = rolling_resistance(state, params, env) + aero_resistance(state, params, env);
  const double margin = grade - resist;
  if (std::abs(margin) <= kBalancedToleranceN) return DriveStateKind::kBalanced;
  return margin > 0.0 ? DriveStateKind::kBraking : DriveStateKind::kMotoring;
}

}  // namespace wheelsim
