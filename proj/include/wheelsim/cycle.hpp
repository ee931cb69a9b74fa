#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wheelsim/drive_strategy.hpp"
#include "wheelsim/efficiency_map.hpp"
#include "wheelsim/vehicle.hpp"

namespace wheelsim {

enum class SpeedUnit { kKmh, kMph };

std::string_view to_string(SpeedUnit unit);
SpeedUnit speed_unit_from_string(std::string_view name);

struct CycleSample {
  double time_s = 0.0;
  double speed_kmh = 0.0;
};

/// Timestamped speed trace. Speeds are always stored in km/h.
struct DrivingCycle {
  std::string name;
  std::vector<CycleSample> samples;
  SpeedUnit source_unit = SpeedUnit::kKmh;

  /// Throws ParseError on fewer than 2 samples, non-increasing time or
  /// negative speed.
  void validate() const;
  double duration_s() const { return samples.back().time_s - samples.front().time_s; }
};

/// Reads a `time_s,speed` CSV. Speeds in mph are converted to km/h.
DrivingCycle load_cycle(const std::filesystem::path& path, SpeedUnit unit);
DrivingCycle parse_cycle(std::string_view text, SpeedUnit unit, std::string name,
                         std::string_view source = "<memory>");

/// Trapezoidal distance, km.
double cycle_distance(const DrivingCycle& cycle);

/// How much of the decelerating inertial power is sent back to the battery.
struct RegenPolicy {
  double recovery_fraction = 1.0;
  // Fixed regeneration chain efficiency. When unset, each step uses
  // eta_b(n, T) * eta_c * eta_recover * eta_t * eta_i.
  std::optional<double> chain_eff;

  void validate() const;
};

struct CycleStep {
  double time_s = 0.0;        // interval start
  double speed_kmh = 0.0;     // interval midpoint speed
  double accel_m_s2 = 0.0;
  double wheel_force_n = 0.0; // signed net force at the wheels
  double motor_efficiency = 0.0;
  double traction_wh = 0.0;
  double regen_wh = 0.0;
  bool clamped = false;
};

struct CycleResult {
  std::string cycle_name;
  double unit_energy_wh_per_km = 0.0;
  double traction_share = 0.0;  // net traction (after regen) over total
  double sscm_share = 0.0;
  double regen_recovered_wh_per_km = 0.0;
  double distance_km = 0.0;
  double duration_s = 0.0;
  double traction_wh = 0.0;     // gross battery energy for traction
  double regen_wh = 0.0;        // battery energy recovered
  double sscm_wh = 0.0;
  std::size_t clamped_steps = 0;
  std::vector<CycleStep> trace;
};

struct CycleOptions {
  double grade_deg = 0.0;
  double cargo_kg = 0.0;
  bool keep_trace = false;
};

/// Time-stepped unit energy over a speed trace. Each sample interval uses a
/// forward-difference acceleration and forces at the midpoint speed.
CycleResult simulate_cycle(const DrivingCycle& cycle, const VehicleParams& params,
                           const Environment& env, const MotorMaps& maps,
                           const RegenPolicy& policy = {}, const CycleOptions& options = {});

/// Same integration for the geared baseline car: one map for both directions
/// and no self-driving load.
CycleResult simulate_baseline_cycle(const DrivingCycle& cycle, const VehicleParams& baseline_params,
                                    const Environment& env, const EfficiencyMap& baseline_map,
                                    const RegenPolicy& policy = {},
                                    const CycleOptions& options = {});

}  // namespace wheelsim
