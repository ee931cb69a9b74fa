#include "wheelsim/drive_strategy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wheelsim/error.hpp"

namespace wheelsim {
namespace {

// 9550 converts N*m * rpm to kW; 3.6 and 30/pi fold in the km/h <-> rpm
// relation so that the result is energy per km of road.
double rate_constant(const VehicleParams& p) {
  return 30.0 / (std::numbers::pi * p.tire_radius_m * 3.6 * 9550.0);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool better(const OperatingPoint& candidate, const OperatingPoint& incumbent) {
  // Strict comparison keeps the earlier (lower-speed) point on ties.
  return candidate.energy_wh_per_km < incumbent.energy_wh_per_km;
}

}  // namespace

void SlopeScenario::validate() const {
  if (!(distance_km > 0.0)) throw ConfigError("scenario distance_km must be > 0");
  if (!(initial_speed_kmh >= 0.0)) throw ConfigError("scenario initial_speed_kmh must be >= 0");
  if (!(std::abs(slope_deg) < 90.0)) throw ConfigError("scenario slope_deg must be within (-90, 90)");
  if (!(cargo_kg >= 0.0)) throw ConfigError("scenario cargo_kg must be >= 0");
}

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::kNone: return "";
    case Violation::kSpeedLimit: return "speed_limit";
    case Violation::kTorqueLimit: return "torque_limit";
    case Violation::kRegimeMismatch: return "regime_mismatch";
  }
  return "unknown";
}

double demanding_factor(double demand_torque_nm, double motor_efficiency) {
  if (!(motor_efficiency > 0.0)) throw DomainError("motoring efficiency must be > 0");
  return demand_torque_nm / motor_efficiency;
}

double regenerating_factor(double demand_torque_nm, double braking_efficiency) {
  return std::abs(demand_torque_nm) * braking_efficiency;
}

double traction_energy_rate(double lambda_nm, const VehicleParams& params) {
  return rate_constant(params) / params.traction_chain_eff() * lambda_nm;
}

double recovery_energy_rate(double lambda2_nm, const VehicleParams& params) {
  return rate_constant(params) * params.recovery_chain_eff() * lambda2_nm;
}

double motor_efficiency(const EfficiencyMap& map, double rpm, double torque_per_motor_nm) {
  if (rpm < kDeadBandRpm || torque_per_motor_nm < kDeadBandTorqueNm) return map.floor_value();
  return map.lookup(rpm, torque_per_motor_nm);
}

DriveModel::DriveModel(VehicleParams params, Environment env, MotorMaps maps,
                       ClassifierSpeed classifier)
    : params_(params), env_(env), maps_(std::move(maps)), classifier_(classifier) {
  params_.validate();
  env_.validate();
}

MotionState DriveModel::state_at(double speed_kmh, const SlopeScenario& scenario) const {
  MotionState s;
  s.speed_kmh = speed_kmh;
  s.accel_m_s2 = scenario.accel_m_s2;
  s.slope_deg = scenario.slope_deg;
  s.cargo_kg = scenario.cargo_kg;
  return s;
}

DriveStateKind DriveModel::regime(const SlopeScenario& scenario, double speed_kmh) const {
  const double v = classifier_ == ClassifierSpeed::kInitialSpeed ? scenario.initial_speed_kmh
                                                                 : speed_kmh;
  return classify_drive_state(state_at(v, scenario), params_, env_);
}

OperatingPoint DriveModel::evaluate(double speed_kmh, const SlopeScenario& scenario) const {
  if (!(speed_kmh > 0.0)) {
    throw DomainError("energy per km is undefined at speed " + std::to_string(speed_kmh) + " km/h");
  }
  const MotionState state = state_at(speed_kmh, scenario);
  OperatingPoint pt;
  pt.speed_kmh = speed_kmh;
  pt.rpm = wheel_rpm(speed_kmh, params_.tire_radius_m);
  pt.total_torque_nm = demand_torque(state, params_, env_);
  pt.torque_per_motor_nm = std::abs(pt.total_torque_nm) / params_.motor_count;
  pt.energy_wh_per_km = kNaN;

  const double sscm_wh_per_km = params_.sscm_power_w / speed_kmh;
  DriveStateKind kind = regime(scenario, speed_kmh);
  if (kind == DriveStateKind::kBalanced) {
    // The regime can be balanced at the benchmark speed while the swept speed
    // still needs traction or braking.
    const double net_force = pt.total_torque_nm / params_.tire_radius_m;
    if (std::abs(net_force) > kBalancedToleranceN) {
      kind = net_force > 0.0 ? DriveStateKind::kMotoring : DriveStateKind::kBraking;
    }
  }
  pt.state = kind;

  auto reject = [&pt](Violation v) {
    pt.feasible = false;
    pt.violation = v;
    return pt;
  };

  if (kind == DriveStateKind::kBalanced) {
    pt.energy_wh_per_km = sscm_wh_per_km;
    return pt;
  }
  if ((kind == DriveStateKind::kMotoring && pt.total_torque_nm < 0.0) ||
      (kind == DriveStateKind::kBraking && pt.total_torque_nm > 0.0)) {
    return reject(Violation::kRegimeMismatch);
  }

  const EfficiencyMap& map = kind == DriveStateKind::kMotoring ? maps_.motoring : maps_.braking;
  if (pt.rpm > params_.max_motor_rpm || pt.rpm > map.max_rpm()) {
    return reject(Violation::kSpeedLimit);
  }
  if (pt.torque_per_motor_nm > params_.max_motor_torque_nm ||
      pt.torque_per_motor_nm > map.max_torque_nm()) {
    return reject(Violation::kTorqueLimit);
  }

  pt.motor_efficiency = motor_efficiency(map, pt.rpm, pt.torque_per_motor_nm);
  if (kind == DriveStateKind::kMotoring) {
    pt.energy_factor = demanding_factor(pt.total_torque_nm, pt.motor_efficiency);
    pt.energy_wh_per_km = 1000.0 * traction_energy_rate(pt.energy_factor, params_) + sscm_wh_per_km;
  } else {
    pt.energy_factor = regenerating_factor(pt.total_torque_nm, pt.motor_efficiency);
    pt.energy_wh_per_km =
        -(1000.0 * recovery_energy_rate(pt.energy_factor, params_) - sscm_wh_per_km);
  }
  return pt;
}

namespace {

[[noreturn]] void throw_infeasible(const OperatingPoint& pt) {
  throw InfeasibleError("operating point at " + std::to_string(pt.speed_kmh) + " km/h (" +
                        std::to_string(pt.rpm) + " rpm, " + std::to_string(pt.torque_per_motor_nm) +
                        " N*m per motor) is infeasible: " + std::string(to_string(pt.violation)));
}

}  // namespace

double DriveModel::demanding_energy_factor(double speed_kmh, const SlopeScenario& scenario) const {
  const auto pt = evaluate(speed_kmh, scenario);
  if (pt.state != DriveStateKind::kMotoring) {
    throw StateError("demanding energy factor requested for a " +
                     std::string(to_string(pt.state)) + " point");
  }
  if (!pt.feasible) throw_infeasible(pt);
  return pt.energy_factor;
}

double DriveModel::regenerating_energy_factor(double speed_kmh,
                                              const SlopeScenario& scenario) const {
  const auto pt = evaluate(speed_kmh, scenario);
  if (pt.state == DriveStateKind::kBalanced) return 0.0;
  if (pt.state != DriveStateKind::kBraking) {
    throw StateError("regenerating energy factor requested for a " +
                     std::string(to_string(pt.state)) + " point");
  }
  if (!pt.feasible) throw_infeasible(pt);
  return pt.energy_factor;
}

double DriveModel::energy_per_km(double speed_kmh, const SlopeScenario& scenario) const {
  const auto pt = evaluate(speed_kmh, scenario);
  if (!pt.feasible) throw_infeasible(pt);
  return pt.energy_wh_per_km;
}

SpeedSweep DriveModel::sweep_speeds(const SlopeScenario& scenario, const SpeedGrid& grid) const {
  scenario.validate();
  if (!(grid.vmin_kmh > 0.0 && grid.vmin_kmh < grid.vmax_kmh)) {
    throw DomainError("sweep needs 0 < vmin < vmax");
  }
  if (!(grid.step_kmh > 0.0)) throw DomainError("sweep step must be > 0");
  if (grid.vmax_kmh > max_speed_kmh() + 1e-9) {
    throw DomainError("sweep vmax " + std::to_string(grid.vmax_kmh) +
                      " km/h exceeds the motor speed limit (" + std::to_string(max_speed_kmh()) +
                      " km/h)");
  }

  SpeedSweep sweep;
  sweep.scenario = scenario;
  sweep.regime = regime(scenario, scenario.initial_speed_kmh);
  const auto count =
      static_cast<std::size_t>(std::floor((grid.vmax_kmh - grid.vmin_kmh) / grid.step_kmh + 1e-9)) + 1;
  sweep.points.reserve(count);
  bool found = false;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = grid.vmin_kmh + static_cast<double>(i) * grid.step_kmh;
    sweep.points.push_back(evaluate(v, scenario));
    const auto& pt = sweep.points.back();
    if (pt.feasible && (!found || better(pt, sweep.points[sweep.optimum_index]))) {
      sweep.optimum_index = i;
      found = true;
    }
  }
  if (!found) {
    throw InfeasibleError("no feasible operating point for slope " +
                          std::to_string(scenario.slope_deg) + " deg between " +
                          std::to_string(grid.vmin_kmh) + " and " + std::to_string(grid.vmax_kmh) +
                          " km/h");
  }
  return sweep;
}

OperatingPoint DriveModel::optimal_speed(const SlopeScenario& scenario, const SpeedGrid& grid) const {
  const SpeedSweep sweep = sweep_speeds(scenario, grid);
  OperatingPoint best = sweep.optimum();
  if (grid.refine_step_kmh <= 0.0 || grid.refine_step_kmh >= grid.step_kmh) return best;

  const double lo = std::max(grid.vmin_kmh, best.speed_kmh - grid.step_kmh);
  const double hi = std::min(grid.vmax_kmh, best.speed_kmh + grid.step_kmh);
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / grid.refine_step_kmh + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    const auto pt = evaluate(lo + static_cast<double>(i) * grid.refine_step_kmh, scenario);
    if (pt.feasible && better(pt, best)) best = pt;
  }
  return best;
}

}  // namespace wheelsim
