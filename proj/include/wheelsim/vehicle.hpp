#pragma once

#include <string_view>

namespace wheelsim {

/// Vehicle and powertrain parameters. Defaults describe the two-motor
/// in-wheel-motor autonomous EV; see baseline() for the geared reference car.
struct VehicleParams {
  double mass_kg = 1436.0;
  // Equivalent mass of rotating parts, added to body mass for F_a.
  double rotating_mass_kg = 148.0;
  double frontal_area_m2 = 2.7435;
  double drag_coeff = 0.29;
  double tire_radius_m = 0.31595;
  double rolling_coeff = 0.01;

  double battery_charge_eff = 0.867;
  double battery_discharge_eff = 0.885;
  double transmission_eff = 1.0;
  double inverter_eff = 0.974;
  double brake_recovery_rate = 0.85;

  double sscm_power_w = 240.0;
  double max_motor_rpm = 1600.0;
  double max_motor_torque_nm = 1250.0;
  int motor_count = 2;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  /// Battery-to-wheel chain excluding the motor: eta_d * eta_i * eta_t.
  double traction_chain_eff() const {
    return battery_discharge_eff * inverter_eff * transmission_eff;
  }
  /// Wheel-to-battery chain excluding the motor:
  /// eta_c * eta_recover * eta_t * eta_i.
  double recovery_chain_eff() const {
    return battery_charge_eff * brake_recovery_rate * transmission_eff * inverter_eff;
  }
  double max_total_torque_nm() const { return max_motor_torque_nm * motor_count; }

  static VehicleParams iwm_aev() { return {}; }
  /// Front-motor geared EV the IWM vehicle is derived from. Single motor,
  /// no self-driving module.
  static VehicleParams baseline();
};

struct Environment {
  double air_density_kg_m3 = 1.2041;
  double gravity_m_s2 = 9.81;

  void validate() const;
};

struct MotionState {
  double speed_kmh = 0.0;
  double accel_m_s2 = 0.0;
  double slope_deg = 0.0;  // positive = upslope
  double cargo_kg = 0.0;

  void validate() const;
};

enum class DriveStateKind { kMotoring, kBalanced, kBraking };

std::string_view to_string(DriveStateKind kind);

/// |F_g| within this many newtons of F_r + F_d counts as balanced.
inline constexpr double kBalancedToleranceN = 1.0;

/// Aerodynamic drag, N.
double aero_resistance(const MotionState& state, const VehicleParams& params,
                       const Environment& env);
/// Rolling resistance, N.
double rolling_resistance(const MotionState& state, const VehicleParams& params,
                          const Environment& env);
/// Grade force, N. Signed: negative on downslopes.
double slope_resistance(const MotionState& state, const VehicleParams& params,
                        const Environment& env);
/// Inertial force including the rotating-mass equivalent, N.
double acceleration_resistance(const MotionState& state, const VehicleParams& params);

/// Total wheel torque needed to hold the motion state, N*m. Negative means
/// the wheels must brake.
double demand_torque(const MotionState& state, const VehicleParams& params,
                     const Environment& env);

/// Demand torque written as k * v^2 + b with v in m/s.
struct QuadraticCoeffs {
  double k = 0.0;  // N*m per (m/s)^2
  double b = 0.0;  // N*m

  double torque_at(double speed_ms) const { return k * speed_ms * speed_ms + b; }
};

QuadraticCoeffs quadratic_coeffs(double slope_deg, double accel_m_s2, const VehicleParams& params,
                                 const Environment& env, double cargo_kg = 0.0);

/// Wheel speed in rpm for a road speed in km/h.
double wheel_rpm(double speed_kmh, double tire_radius_m);
/// Inverse of wheel_rpm.
double speed_at_rpm(double rpm, double tire_radius_m);

/// Motoring / balanced / braking from the grade force against rolling plus
/// drag. Upslope and flat road are always motoring.
DriveStateKind classify_drive_state(const MotionState& state, const VehicleParams& params,
                                    const Environment& env);

}  // namespace wheelsim
