#pragma once

#include <string>
#include <vector>

#include "wheelsim/drive_strategy.hpp"
#include "wheelsim/vehicle.hpp"

namespace wheelsim {

struct SscmComponent {
  std::string name;
  std::string model;
  double power_w = 0.0;
  double mass_kg = 0.0;
  int count = 0;

  void validate() const;
};

struct SscmTotals {
  double power_w = 0.0;
  double mass_kg = 0.0;
};

/// Sensing and computing hardware of the self-driving kit, one row per part.
std::vector<SscmComponent> default_sscm_components();

/// Sums power * count and mass * count over all rows.
SscmTotals sscm_aggregate(const std::vector<SscmComponent>& components);

/// Energy consumers removed from the measured baseline before comparing.
struct BaselineShares {
  double acceleration = 0.173;
  double auxiliary = 0.027;
  double driver = 0.069;

  double sum() const { return acceleration + auxiliary + driver; }
};

/// raw * (1 - sum of shares). Throws DomainError if a share is outside
/// [0, 1) or the shares add up to 1 or more.
double adjust_baseline(double raw_wh_per_km, const BaselineShares& shares);

struct CaseStudyConfig {
  double slope_deg = 0.3;
  double leg_distance_km = 124.1;
  double baseline_raw_wh_per_km = 157.9;
  BaselineShares shares;
  // Used only by the first-principles baseline.
  double baseline_speed_kmh = 88.5;
  double driver_mass_kg = 89.7;
  SpeedGrid grid;

  void validate() const;
};

struct LegResult {
  double speed_kmh = 0.0;
  double energy_wh_per_km = 0.0;
  DriveStateKind state = DriveStateKind::kMotoring;
};

struct CaseStudyReport {
  double baseline_raw_wh_per_km = 0.0;
  double baseline_adjusted_wh_per_km = 0.0;
  BaselineShares shares;
  LegResult iwm_upslope;
  LegResult iwm_downslope;
  double iwm_average_wh_per_km = 0.0;
  double savings = 0.0;  // 1 - iwm_average / baseline_adjusted

  // Baseline car simulated directly at the reported trip speed, with and
  // without the driver on board.
  double baseline_sim_with_driver_wh_per_km = 0.0;
  double baseline_sim_without_driver_wh_per_km = 0.0;
  double savings_vs_sim = 0.0;  // against the driverless simulation
};

/// Round trip over a constant grade: upslope at its optimal speed, then
/// downslope starting from that speed. Infeasible optima propagate as
/// InfeasibleError.
CaseStudyReport run_case_study(const CaseStudyConfig& config, const DriveModel& iwm,
                               const DriveModel& baseline);

}  // namespace wheelsim
