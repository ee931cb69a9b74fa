// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wheelsim/case_study.hpp"
#include "wheelsim/config.hpp"
#include "wheelsim/cycle.hpp"
#include "wheelsim/drive_strategy.hpp"
#include "wheelsim/vehicle.hpp"

using namespace wheelsim;

namespace {

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }
bool within_abs(double value, double target, double tol) { return std::abs(value - target) <= tol; }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [miss: " << what << "]";
    }
  }
};

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

SlopeScenario slope(double deg) {
  SlopeScenario s;
  s.slope_deg = deg;
  return s;
}

// Direct power-over-speed path, kept independent of the factor formulas.
double direct_energy(const OperatingPoint& pt, const VehicleParams& p) {
  const double kw = pt.total_torque_nm * pt.rpm / 9550.0;
  if (pt.state == DriveStateKind::kBraking) {
    const double chain = p.battery_charge_eff * p.brake_recovery_rate * pt.motor_efficiency * p.transmission_eff *
                         p.inverter_eff;
    return kw * chain / pt.speed_kmh * 1000.0 + p.sscm_power_w / pt.speed_kmh;
  }
  const double chain = p.battery_discharge_eff * p.inverter_eff * pt.motor_efficiency * p.transmission_eff;
  return kw / chain / pt.speed_kmh * 1000.0 + p.sscm_power_w / pt.speed_kmh;
}

// Number of direction changes of a feasible 1 km/h sweep.
int extrema(const SpeedSweep& sweep) {
  std::vector<double> e;
  for (const auto& pt : sweep.points) {
    if (pt.feasible) e.push_back(pt.energy_wh_per_km);
  }
  int changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < e.size(); ++i) {
    const int dir = e[i] > e[i - 1] ? 1 : (e[i] < e[i - 1] ? -1 : 0);
    if (dir == 0) continue;
    if (last != 0 && dir != last) ++changes;
    last = dir;
  }
  return changes;
}

SpeedGrid coarse(double vmax = 120.0) {
  SpeedGrid g;
  g.vmax_kmh = vmax;
  g.refine_step_kmh = 0.0;
  return g;
}

}  // namespace

int main() {
  const RunConfig config = RunConfig::defaults();
  const DriveModel iwm = config.iwm_model();
  const DriveModel base = config.baseline_model();
  const MotorMaps maps = config.build_maps();
  const MotorMaps base_maps = base.maps();

  std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria;

  std::vector<CycleResult> iwm_cycles, base_cycles;
  auto cycles = [&] {
    if (!iwm_cycles.empty()) return;
    for (const auto& entry : config.cycles) {
      const auto c = load_cycle(entry.file, entry.unit);
      iwm_cycles.push_back(simulate_cycle(c, config.vehicle, config.environment, maps, config.regen));
      base_cycles.push_back(
          simulate_baseline_cycle(c, config.baseline_vehicle, config.environment, base_maps.motoring));
    }
  };

  criteria.emplace_back(1, [&](Outcome& o) {
    cycles();
    const double targets[] = {140.3, 163.4};
    const double shares[] = {0.054, 0.019};
    const double share_tol[] = {0.015, 0.01};
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& r = iwm_cycles[i];
      o.detail << " " << r.cycle_name << "=" << fmt(r.unit_energy_wh_per_km, 1) << " Wh/km share="
               << fmt(100 * r.sscm_share, 1) << "%";
      o.require(within_rel(r.unit_energy_wh_per_km, targets[i], 0.15), r.cycle_name + " energy");
      o.require(within_abs(r.sscm_share, shares[i], share_tol[i]), r.cycle_name + " sscm share");
    }
  });

  criteria.emplace_back(2, [&](Outcome& o) {
    cycles();
    const double targets[] = {147.8, 172.6};
    for (std::size_t i = 0; i < 2; ++i) {
      const double ratio = iwm_cycles[i].unit_energy_wh_per_km / base_cycles[i].unit_energy_wh_per_km;
      o.detail << " " << base_cycles[i].cycle_name << "=" << fmt(base_cycles[i].unit_energy_wh_per_km, 1)
               << " ratio=" << fmt(ratio, 3);
      o.require(within_rel(base_cycles[i].unit_energy_wh_per_km, targets[i], 0.15), "baseline energy");
      o.require(ratio >= 0.90 && ratio <= 1.00, "ratio");
    }
  });

  auto optima = [&](Outcome& o, const double (&rows)[3][3], bool magnitude) {
    double prev = -1.0;
    for (const auto& row : rows) {
      const auto pt = iwm.optimal_speed(slope(row[0]), config.grid);
      const double e = magnitude ? std::abs(pt.energy_wh_per_km) : pt.energy_wh_per_km;
      o.detail << " " << fmt(row[0], 0) << "deg:" << fmt(pt.speed_kmh, 1) << "km/h," << fmt(pt.energy_wh_per_km, 1);
      o.require(within_abs(pt.speed_kmh, row[1], 10.0), "speed at " + fmt(row[0], 0));
      o.require(within_rel(e, row[2], 0.15), "energy at " + fmt(row[0], 0));
      o.require(e > prev, "ordering");
      if (magnitude) o.require(pt.state == DriveStateKind::kBraking, "braking state");
      prev = e;
    }
  };

  criteria.emplace_back(3, [&](Outcome& o) {
    const double rows[3][3] = {{5, 36, 538.7}, {10, 52, 981.7}, {15, 64, 1435.5}};
    optima(o, rows, false);
  });

  criteria.emplace_back(4, [&](Outcome& o) {
    const double rows[3][3] = {{-5, 40, 161.2}, {-10, 54, 379.6}, {-15, 68, 585.9}};
    optima(o, rows, true);
  });

  criteria.emplace_back(5, [&](Outcome& o) {
    const double rows[3][2] = {{-0.2, 63.9}, {-0.5, 49.2}, {-0.8, 14.6}};
    double prev = INFINITY;
    for (const auto& row : rows) {
      const auto pt = iwm.optimal_speed(slope(row[0]), config.grid);
      o.detail << " " << fmt(row[0], 1) << "deg:" << fmt(pt.speed_kmh, 1) << "km/h," << fmt(pt.energy_wh_per_km, 2)
               << "(" << to_string(pt.state) << ")";
      o.require(within_abs(pt.speed_kmh, 31.0, 5.0), "speed at " + fmt(row[0], 1));
      o.require(within_rel(pt.energy_wh_per_km, row[1], 0.20), "energy at " + fmt(row[0], 1));
      o.require(pt.energy_wh_per_km < prev, "ordering");
      prev = pt.energy_wh_per_km;
    }
  });

  criteria.emplace_back(6, [&](Outcome& o) {
    const auto r = run_case_study(config.case_study, iwm, base);
    o.detail << " up=" << fmt(r.iwm_upslope.speed_kmh, 1) << "km/h avg=" << fmt(r.iwm_average_wh_per_km, 1)
             << " adjusted=" << fmt(r.baseline_adjusted_wh_per_km, 1) << " savings=" << fmt(100 * r.savings, 1) << "%";
    o.require(within_abs(r.iwm_upslope.speed_kmh, 25.0, 8.0), "upslope speed");
    o.require(within_rel(r.iwm_average_wh_per_km, 96.4, 0.15), "average");
    o.require(r.savings >= 0.12 && r.savings <= 0.25, "savings");
  });

  criteria.emplace_back(7, [&](Outcome& o) {
    const auto t = sscm_aggregate(default_sscm_components());
    o.detail << " " << fmt(t.power_w, 3) << " W " << fmt(t.mass_kg, 3) << " kg";
    o.require(within_abs(t.power_w, 240.0, 0.5), "power");
    o.require(within_abs(t.mass_kg, 19.0, 0.1), "mass");
  });

  criteria.emplace_back(8, [&](Outcome& o) {
    const double rpm = wheel_rpm(192.0, 0.31595);
    o.detail << " " << fmt(rpm, 1) << " rpm";
    o.require(rpm >= 1590 && rpm <= 1620, "range");
  });

  criteria.emplace_back(9, [&](Outcome& o) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> v(2, 120), th(-15, 15), c(0, 300);
    int checked = 0;
    double worst = 0.0;
    while (checked < 1000) {
      SlopeScenario s = slope(th(rng));
      s.cargo_kg = c(rng);
      const auto pt = iwm.evaluate(v(rng), s);
      if (!pt.feasible || pt.state == DriveStateKind::kBalanced) continue;
      const double direct = direct_energy(pt, iwm.params());
      worst = std::max(worst, std::abs(pt.energy_wh_per_km - direct) / std::abs(direct));
      ++checked;
    }
    o.detail << " worst rel err " << worst;
    o.require(worst < 1e-9, "tolerance");
  });

  criteria.emplace_back(10, [&](Outcome& o) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> v(0, 190), th(-30, 30), a(-3, 3), m(0, 500);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      MotionState s;
      s.speed_kmh = v(rng);
      s.slope_deg = th(rng);
      s.accel_m_s2 = a(rng);
      s.cargo_kg = m(rng);
      const double direct = demand_torque(s, config.vehicle, config.environment);
      const double quad = quadratic_coeffs(s.slope_deg, s.accel_m_s2, config.vehicle, config.environment, s.cargo_kg)
                              .torque_at(s.speed_kmh / 3.6);
      worst = std::max(worst, std::abs(direct - quad) / std::max(1.0, std::abs(direct)));
    }
    o.detail << " worst rel err " << worst;
    o.require(worst <= 1e-12, "tolerance");
  });

  criteria.emplace_back(11, [&](Outcome& o) {
    double node_err = 0.0, edge_err = 0.0;
    for (const auto* m : {&maps.motoring, &maps.braking, &base_maps.motoring}) {
      const auto sa = m->speed_axis();
      const auto ta = m->torque_axis();
      for (std::size_t i = 0; i < sa.size(); ++i) {
        for (std::size_t j = 0; j < ta.size(); ++j) {
          node_err = std::max(node_err, std::abs(m->lookup(sa[i], ta[j]) - m->at(i, j)));
        }
      }
      std::mt19937_64 rng(11);
      std::uniform_real_distribution<double> u(0, 1);
      for (std::size_t i = 1; i + 1 < sa.size(); ++i) {
        const double t = u(rng) * ta.back();
        edge_err = std::max(edge_err, std::abs(m->lookup(std::nextafter(sa[i], 0.0), t) - m->lookup(sa[i], t)));
      }
      for (std::size_t j = 1; j + 1 < ta.size(); ++j) {
        const double n = u(rng) * sa.back();
        edge_err = std::max(edge_err, std::abs(m->lookup(n, std::nextafter(ta[j], 0.0)) - m->lookup(n, ta[j])));
      }
    }
    o.detail << " node err " << node_err << " edge err " << edge_err;
    o.require(node_err == 0.0, "nodes");
    o.require(edge_err < 1e-12, "edges");
  });

  criteria.emplace_back(12, [&](Outcome& o) {
    const auto& m = maps.motoring;
    std::size_t above = 0;
    for (std::size_t i = 0; i < m.speed_nodes(); ++i) {
      for (std::size_t j = 0; j < m.torque_nodes(); ++j) above += m.at(i, j) > 0.60;
    }
    const double frac = double(above) / double(m.speed_nodes() * m.torque_nodes());
    o.detail << " peak=" << fmt(m.max_value(), 6) << " area>0.60=" << fmt(100 * frac, 2) << "%";
    o.require(m.max_value() == 0.945, "peak");
    o.require(frac >= 0.90, "area");
  });

  criteria.emplace_back(13, [&](Outcome& o) {
    for (double deg : {5.0, 10.0, 15.0, -5.0, -10.0, -15.0}) {
      const auto sweep = iwm.sweep_speeds(slope(deg), coarse());
      const int n = extrema(sweep);
      const auto& opt = sweep.optimum();
      const bool interior = opt.speed_kmh > sweep.points.front().speed_kmh && opt.speed_kmh < sweep.points.back().speed_kmh;
      o.detail << " " << fmt(deg, 0) << ":" << n;
      o.require(n == 1 && interior, "single extremum at " + fmt(deg, 0));
    }
  });

  criteria.emplace_back(14, [&](Outcome& o) {
    const auto sweep = iwm.sweep_speeds(slope(0.0), coarse());
    const auto& opt = sweep.optimum();
    o.detail << " min at " << fmt(opt.speed_kmh, 0) << " km/h";
    o.require(opt.speed_kmh >= 20 && opt.speed_kmh <= 45, "location");
    o.require(extrema(sweep) == 1, "single minimum");
  });

  criteria.emplace_back(15, [&](Outcome& o) {
    cycles();
    CycleOptions opts;
    opts.keep_trace = true;
    const double m = config.vehicle.mass_kg + config.vehicle.rotating_mass_kg;
    std::size_t violations = 0, regen_steps = 0;
    for (const auto& entry : config.cycles) {
      const auto c = load_cycle(entry.file, entry.unit);
      const auto r = simulate_cycle(c, config.vehicle, config.environment, maps, config.regen, opts);
      for (std::size_t i = 0; i < r.trace.size(); ++i) {
        if (r.trace[i].regen_wh <= 0.0) continue;
        ++regen_steps;
        const double v0 = c.samples[i].speed_kmh / 3.6, v1 = c.samples[i + 1].speed_kmh / 3.6;
        if (r.trace[i].regen_wh > 0.5 * m * (v0 * v0 - v1 * v1) / 3600.0 * (1 + 1e-12)) ++violations;
      }
    }
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> v(0, 150), th(-12, 2);
    const auto& p = config.vehicle;
    const double g = config.environment.gravity_m_s2;
    std::size_t disagreements = 0;
    for (int i = 0; i < 1000; ++i) {
      MotionState s;
      s.speed_kmh = v(rng);
      s.slope_deg = th(rng);
      const double rad = s.slope_deg * std::numbers::pi / 180.0;
      const double vm = s.speed_kmh / 3.6;
      const double fg = p.mass_kg * g * std::sin(rad);
      const double resist = p.mass_kg * g * std::cos(rad) * p.rolling_coeff +
                            0.5 * p.drag_coeff * p.frontal_area_m2 * config.environment.air_density_kg_m3 * vm * vm;
      DriveStateKind expected = DriveStateKind::kMotoring;
      if (s.slope_deg < 0) {
        const double gap = std::abs(fg) - resist;
        if (std::abs(gap) <= 1.0) expected = DriveStateKind::kBalanced;
        else if (gap > 0) expected = DriveStateKind::kBraking;
      }
      disagreements += classify_drive_state(s, p, config.environment) != expected;
    }
    o.detail << " regen steps " << regen_steps << " over budget " << violations << "; classifier mismatches "
             << disagreements;
    o.require(violations == 0, "kinetic budget");
    o.require(disagreements == 0, "classifier");
  });

  int failed = 0;
  for (auto& [id, run] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 5.0, "runtime");
    failed += !o.pass;
    std::printf("%s criterion %d:%s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, o.detail.str().c_str(), secs);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
