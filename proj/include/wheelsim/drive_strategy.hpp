#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "wheelsim/efficiency_map.hpp"
#include "wheelsim/vehicle.hpp"

namespace wheelsim {

struct MotorMaps {
  EfficiencyMap motoring;
  EfficiencyMap braking;
};

/// Constant-speed driving task on a uniform grade.
struct SlopeScenario {
  double slope_deg = 0.0;
  // Speed used for the drag term when deciding whether a downslope needs
  // braking.
  double initial_speed_kmh = 30.0;
  double distance_km = 1.0;
  double cargo_kg = 0.0;
  double accel_m_s2 = 0.0;

  void validate() const;
};

/// Which speed feeds the drag term of the drive-state classifier.
enum class ClassifierSpeed { kInitialSpeed, kSweptSpeed };

enum class Violation { kNone, kSpeedLimit, kTorqueLimit, kRegimeMismatch };

std::string_view to_string(Violation v);

struct OperatingPoint {
  double speed_kmh = 0.0;
  double rpm = 0.0;
  double torque_per_motor_nm = 0.0;  // magnitude used for the map lookup
  double total_torque_nm = 0.0;      // signed wheel demand
  double motor_efficiency = 0.0;     // eta_m or eta_b, 0 when no lookup happened
  double energy_factor = 0.0;        // lambda (motoring) or lambda_2 (braking), N*m
  double energy_wh_per_km = 0.0;     // + consumed, - regenerated; NaN when infeasible
  DriveStateKind state = DriveStateKind::kMotoring;
  bool feasible = true;
  Violation violation = Violation::kNone;
};

struct SpeedGrid {
  double vmin_kmh = 1.0;
  double vmax_kmh = 120.0;
  double step_kmh = 1.0;
  // Resolution of the local search around the best grid point; 0 disables.
  double refine_step_kmh = 0.1;
};

struct SpeedSweep {
  SlopeScenario scenario;
  DriveStateKind regime = DriveStateKind::kMotoring;
  std::vector<OperatingPoint> points;
  std::size_t optimum_index = 0;

  const OperatingPoint& optimum() const { return points.at(optimum_index); }
};

/// lambda = T_dem / eta_m.
double demanding_factor(double demand_torque_nm, double motor_efficiency);
/// lambda_2 = |T_dem| * eta_b.
double regenerating_factor(double demand_torque_nm, double braking_efficiency);

/// Battery energy per km drawn by the traction system for a demanding energy
/// factor, kWh/km. Linear in lambda.
double traction_energy_rate(double lambda_nm, const VehicleParams& params);
/// Battery energy per km recovered for a regenerating energy factor, kWh/km.
double recovery_energy_rate(double lambda2_nm, const VehicleParams& params);

/// Efficiency lookup with the low-speed / low-torque dead band: below 10 rpm
/// or 1 N*m the map's floor value is returned instead of interpolating.
double motor_efficiency(const EfficiencyMap& map, double rpm, double torque_per_motor_nm);

inline constexpr double kDeadBandRpm = 10.0;
inline constexpr double kDeadBandTorqueNm = 1.0;

/// Constant-speed energy model of one vehicle with a fixed pair of motor maps.
class DriveModel {
 public:
  DriveModel(VehicleParams params, Environment env, MotorMaps maps,
             ClassifierSpeed classifier = ClassifierSpeed::kInitialSpeed);

  const VehicleParams& params() const { return params_; }
  const Environment& environment() const { return env_; }
  const MotorMaps& maps() const { return maps_; }
  ClassifierSpeed classifier() const { return classifier_; }

  /// Drive state of the scenario at `speed_kmh` (used only in swept mode).
  DriveStateKind regime(const SlopeScenario& scenario, double speed_kmh) const;

  /// Full evaluation of one speed; never throws for limit violations, they
  /// are reported on the returned point.
  OperatingPoint evaluate(double speed_kmh, const SlopeScenario& scenario) const;

  /// Throws StateError unless motoring, InfeasibleError on motor limits.
  double demanding_energy_factor(double speed_kmh, const SlopeScenario& scenario) const;
  /// Throws StateError unless braking, InfeasibleError on motor limits.
  double regenerating_energy_factor(double speed_kmh, const SlopeScenario& scenario) const;

  /// Signed battery energy per km; throws DomainError for v <= 0 and
  /// InfeasibleError for infeasible points.
  double energy_per_km(double speed_kmh, const SlopeScenario& scenario) const;

  SpeedSweep sweep_speeds(const SlopeScenario& scenario, const SpeedGrid& grid = {}) const;
  /// Grid argmin of signed energy, then a local search at the refine step.
  /// Ties go to the lower speed.
  OperatingPoint optimal_speed(const SlopeScenario& scenario, const SpeedGrid& grid = {}) const;

  /// Road speed at the motor speed limit.
  double max_speed_kmh() const { return speed_at_rpm(params_.max_motor_rpm, params_.tire_radius_m); }

 private:
  MotionState state_at(double speed_kmh, const SlopeScenario& scenario) const;

  VehicleParams params_;
  Environment env_;
  MotorMaps maps_;
  ClassifierSpeed classifier_;
};

}  // namespace wheelsim
