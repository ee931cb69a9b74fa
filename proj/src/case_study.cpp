#include "wheelsim/case_study.hpp"

#include <string>

#include "wheelsim/error.hpp"

namespace wheelsim {

void SscmComponent::validate() const {
  if (!(power_w >= 0.0)) throw ConfigError("SSCM component '" + name + "': power_w must be >= 0");
  if (!(mass_kg >= 0.0)) throw ConfigError("SSCM component '" + name + "': mass_kg must be >= 0");
  if (count < 0) throw ConfigError("SSCM component '" + name + "': count must be >= 0");
}

std::vector<SscmComponent> default_sscm_components() {
  return {
      {"LIDAR", "Velodyne VLP-16", 8.0, 0.83, 2},
      {"Radar", "Bosch LRR4", 4.5, 0.24, 2},
      {"Camera", "Pt. Gray Dragonfly2", 2.1, 0.045, 7},
      {"Sonar", "Bosch Ultrasonic", 0.052, 0.02, 8},
      {"GPS", "NovAtel PwrPak7", 1.8, 0.51, 1},
      {"V2X wireless communication module", "Cohda MK5 module", 2.1, 0.01, 1},
      {"Computer", "Nvidia Drive PX2", 98.0, 5.075, 2},
      // Harness and case draw no power.
      {"Wire harness and case", "", 0.0, 5.7, 1},
  };
}

SscmTotals sscm_aggregate(const std::vector<SscmComponent>& components) {
  SscmTotals totals;
  for (const auto& c : components) {
    c.validate();
    totals.power_w += c.power_w * c.count;
    totals.mass_kg += c.mass_kg * c.count;
  }
  return totals;
}

double adjust_baseline(double raw_wh_per_km, const BaselineShares& shares) {
  for (double s : {shares.acceleration, shares.auxiliary, shares.driver}) {
    if (!(s >= 0.0 && s < 1.0)) {
      throw DomainError("baseline share " + std::to_string(s) + " is outside [0, 1)");
    }
  }
  if (!(shares.sum() < 1.0)) {
    throw DomainError("baseline shares add up to " + std::to_string(shares.sum()) +
                      "; nothing would be left");
  }
  return raw_wh_per_km * (1.0 - shares.sum());
}

void CaseStudyConfig::validate() const {
  if (!(leg_distance_km > 0.0)) throw ConfigError("case study leg_distance_km must be > 0");
  if (!(baseline_raw_wh_per_km > 0.0)) throw ConfigError("case study baseline_raw_wh_per_km must be > 0");
  if (!(baseline_speed_kmh > 0.0)) throw ConfigError("case study baseline_speed_kmh must be > 0");
  if (!(driver_mass_kg >= 0.0)) throw ConfigError("case study driver_mass_kg must be >= 0");
  if (!(slope_deg >= 0.0 && slope_deg < 90.0)) {
    throw ConfigError("case study slope_deg is the upslope angle and must be in [0, 90)");
  }
}

CaseStudyReport run_case_study(const CaseStudyConfig& config, const DriveModel& iwm,
                               const DriveModel& baseline) {
  config.validate();
  CaseStudyReport report;
  report.shares = config.shares;
  report.baseline_raw_wh_per_km = config.baseline_raw_wh_per_km;
  report.baseline_adjusted_wh_per_km = adjust_baseline(config.baseline_raw_wh_per_km, config.shares);

  SlopeScenario up;
  up.slope_deg = config.slope_deg;
  up.distance_km = config.leg_distance_km;
  const OperatingPoint up_best = iwm.optimal_speed(up, config.grid);
  report.iwm_upslope = {up_best.speed_kmh, up_best.energy_wh_per_km, up_best.state};

  SlopeScenario down = up;
  down.slope_deg = -config.slope_deg;
  down.initial_speed_kmh = up_best.speed_kmh;
  const OperatingPoint down_best = iwm.optimal_speed(down, config.grid);
  report.iwm_downslope = {down_best.speed_kmh, down_best.energy_wh_per_km,
                          iwm.regime(down, down_best.speed_kmh)};

  const double d_up = up.distance_km;
  const double d_down = down.distance_km;
  report.iwm_average_wh_per_km = (report.iwm_upslope.energy_wh_per_km * d_up +
                                  report.iwm_downslope.energy_wh_per_km * d_down) /
                                 (d_up + d_down);
  report.savings = 1.0 - report.iwm_average_wh_per_km / report.baseline_adjusted_wh_per_km;

  auto baseline_trip = [&](double cargo_kg) {
    SlopeScenario s = up;
    s.cargo_kg = cargo_kg;
    s.initial_speed_kmh = config.baseline_speed_kmh;
    const double e_up = baseline.energy_per_km(config.baseline_speed_kmh, s);
    s.slope_deg = -config.slope_deg;
    const double e_down = baseline.energy_per_km(config.baseline_speed_kmh, s);
    return 0.5 * (e_up + e_down);
  };
  report.baseline_sim_with_driver_wh_per_km = baseline_trip(config.driver_mass_kg);
  report.baseline_sim_without_driver_wh_per_km = baseline_trip(0.0);
  report.savings_vs_sim =
      1.0 - report.iwm_average_wh_per_km / report.baseline_sim_without_driver_wh_per_km;
  return report;
}

}  // namespace wheelsim
