#include "wheelsim/efficiency_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "text_util.hpp"
#include "wheelsim/error.hpp"

namespace wheelsim {
namespace {

void check_axis(const std::vector<double>& axis, std::string_view name) {
  if (axis.size() < 2) {
    throw DomainError(std::string(name) + " axis needs at least 2 points");
  }
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw DomainError(std::string(name) + " axis must be strictly increasing (index " +
                        std::to_string(i) + ")");
    }
  }
}

std::string fmt_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

// Index of the cell [axis[i], axis[i+1]] containing x; x must be in range.
std::size_t cell_index(std::span<const double> axis, double x) {
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  auto i = static_cast<std::size_t>(std::distance(axis.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, axis.size() - 2);
}

// (x e^(1-x))^p with x = position / peak; equals 1 at the peak and 0 at 0.
double bump(double position, double peak, double rise, double fall) {
  const double x = position / peak;
  const double base = x * std::exp(1.0 - x);
  return std::pow(base, x <= 1.0 ? rise : fall);
}

std::vector<double> profile(const std::vector<double>& axis, double peak_pos, double rise,
                            double fall) {
  std::vector<double> out;
  out.reserve(axis.size());
  for (double a : axis) out.push_back(bump(a, peak_pos, rise, fall));
  const double top = *std::max_element(out.begin(), out.end());
  for (double& v : out) v /= top;
  return out;
}

// Normalized loss-model efficiency at (x, y) = (n / n_max, T / T_max).
struct LossModel {
  double a, b, d, scale;

  LossModel(double xp, double yp, double fixed, double s) : d(fixed), scale(s) {
    // Stationarity of x y / L at (xp, yp) with L = a y^2 + b x + x^3 + d.
    b = (xp * xp * xp - 2.0 * fixed) / xp;
    a = (2.0 * xp * xp * xp - fixed) / (yp * yp);
  }

  double operator()(double x, double y) const {
    const double out = x * y;
    if (out <= 0.0) return 0.0;
    const double losses = scale * (a * y * y + b * x + x * x * x + d);
    return out / (out + losses);
  }
};

std::vector<double> spaced_axis(double hi, int n, double exponent = 1.0) {
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / (n - 1);
    axis[static_cast<std::size_t>(i)] = exponent == 1.0 ? hi * i / (n - 1) : hi * std::pow(u, exponent);
  }
  return axis;
}

}  // namespace

std::string_view to_string(MapMode mode) {
  return mode == MapMode::kMotoring ? "motoring" : "braking";
}

MapMode map_mode_from_string(std::string_view name) {
  if (name == "motoring") return MapMode::kMotoring;
  if (name == "braking") return MapMode::kBraking;
  throw ConfigError("unknown map mode '" + std::string(name) + "' (expected motoring|braking)");
}

std::string_view to_string(SurfaceFamily family) {
  return family == SurfaceFamily::kBumpProduct ? "bump_product" : "loss_model";
}

SurfaceFamily surface_family_from_string(std::string_view name) {
  if (name == "bump_product") return SurfaceFamily::kBumpProduct;
  if (name == "loss_model") return SurfaceFamily::kLossModel;
  throw ConfigError("unknown surface family '" + std::string(name) +
                    "' (expected bump_product|loss_model)");
}

double mode_ceiling(MapMode mode) { return mode == MapMode::kMotoring ? 0.945 : 0.91; }

EfficiencyMap::EfficiencyMap(MapMode mode, std::vector<double> speed_axis_rpm,
                             std::vector<double> torque_axis_nm, std::vector<double> grid)
    : mode_(mode),
      speed_axis_(std::move(speed_axis_rpm)),
      torque_axis_(std::move(torque_axis_nm)),
      grid_(std::move(grid)) {
  check_axis(speed_axis_, "speed");
  check_axis(torque_axis_, "torque");
  if (speed_axis_.front() < 0.0 || torque_axis_.front() < 0.0) {
    throw DomainError("map axes must start at or above 0");
  }
  if (grid_.size() != speed_axis_.size() * torque_axis_.size()) {
    throw DomainError("map grid has " + std::to_string(grid_.size()) + " values, expected " +
                      std::to_string(speed_axis_.size() * torque_axis_.size()));
  }
  const double ceiling = mode_ceiling(mode_);
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const double v = grid_[k];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("map value " + fmt_num(v) + " outside [0, 1] at node (" +
                        std::to_string(k / torque_axis_.size()) + ", " +
                        std::to_string(k % torque_axis_.size()) + ")");
    }
    if (v > ceiling + 1e-12) {
      throw DomainError(std::string(to_string(mode_)) + " map value " + fmt_num(v) +
                        " exceeds the mode ceiling " + fmt_num(ceiling));
    }
  }
}

double EfficiencyMap::max_value() const { return *std::max_element(grid_.begin(), grid_.end()); }

double EfficiencyMap::floor_value() const {
  double best = 0.0;
  for (double v : grid_) {
    if (v > 0.0 && (best == 0.0 || v < best)) best = v;
  }
  return best;
}

double EfficiencyMap::lookup(double rpm, double torque_nm) const {
  if (!(rpm >= speed_axis_.front())) {
    throw DomainError("speed " + fmt_num(rpm) + " rpm is below the map axis start " +
                      fmt_num(speed_axis_.front()) + " rpm");
  }
  if (rpm > max_rpm()) {
    throw DomainError("speed exceeds " + fmt_num(max_rpm()) + " rpm (got " + fmt_num(rpm) + ")");
  }
  if (!(torque_nm >= torque_axis_.front())) {
    throw DomainError("torque " + fmt_num(torque_nm) + " N*m is below the map axis start " +
                      fmt_num(torque_axis_.front()) + " N*m");
  }
  if (torque_nm > max_torque_nm()) {
    throw DomainError("torque exceeds " + fmt_num(max_torque_nm()) + " N*m (got " +
                      fmt_num(torque_nm) + ")");
  }
  const std::size_t i = cell_index(speed_axis_, rpm);
  const std::size_t j = cell_index(torque_axis_, torque_nm);
  const double x = (rpm - speed_axis_[i]) / (speed_axis_[i + 1] - speed_axis_[i]);
  const double y = (torque_nm - torque_axis_[j]) / (torque_axis_[j + 1] - torque_axis_[j]);
  // Corner weights; exact at nodes because x and y are then 0 or 1.
  return (1 - x) * (1 - y) * at(i, j) + x * (1 - y) * at(i + 1, j) + (1 - x) * y * at(i, j + 1) +
         x * y * at(i + 1, j + 1);
}

void MapSynthesisSpec::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("map synthesis: " + what); };
  if (!(floor_efficiency > 0.0 && floor_efficiency < peak_efficiency && peak_efficiency <= 1.0)) {
    fail("need 0 < floor_efficiency < peak_efficiency <= 1");
  }
  if (peak_efficiency > mode_ceiling(mode) + 1e-12) {
    fail("peak_efficiency " + fmt_num(peak_efficiency) + " exceeds the " +
         std::string(to_string(mode)) + " ceiling " + fmt_num(mode_ceiling(mode)));
  }
  if (!(peak_speed_frac > 0.0 && peak_speed_frac < 1.0)) fail("peak_speed_frac must be in (0, 1)");
  if (!(peak_torque_frac > 0.0 && peak_torque_frac < 1.0)) fail("peak_torque_frac must be in (0, 1)");
  for (double e : {speed_rise, speed_fall, torque_rise, torque_fall}) {
    if (!(e > 0.0)) fail("decay exponents must be > 0");
  }
  if (!(loss_scale > 0.0)) fail("loss_scale must be > 0");
  if (!(torque_axis_exponent >= 1.0 && torque_axis_exponent <= 4.0)) {
    fail("torque_axis_exponent must be in [1, 4]");
  }
  if (!(fixed_loss >= 0.0 && fixed_loss <= 0.5 * std::pow(peak_speed_frac, 3))) {
    fail("fixed_loss must be in [0, peak_speed_frac^3 / 2]");
  }
  if (speed_nodes < 8 || torque_nodes < 8) fail("grid resolution must be >= 8 per axis");
  if (!(max_rpm > 0.0 && max_torque_nm > 0.0)) fail("axis limits must be > 0");
  if (!(area_threshold >= 0.0 && area_threshold <= 1.0)) fail("area_threshold must be in [0, 1]");
  if (!(min_area_fraction >= 0.0 && min_area_fraction <= 1.0)) {
    fail("min_area_fraction must be in [0, 1]");
  }
}

std::string MapSynthesisSpec::fingerprint() const {
  std::uint64_t h = detail::fnv1a(nullptr, 0);
  auto mix = [&h](const auto& value) { h = detail::fnv1a(&value, sizeof value, h); };
  mix(mode == MapMode::kMotoring ? 0 : 1);
  mix(family == SurfaceFamily::kBumpProduct ? 0 : 1);
  for (double d : {peak_efficiency, floor_efficiency, peak_speed_frac, peak_torque_frac, speed_rise,
                   speed_fall, torque_rise, torque_fall, loss_scale, fixed_loss,
                   torque_axis_exponent, max_rpm, max_torque_nm, area_threshold,
                   min_area_fraction}) {
    mix(d);
  }
  mix(speed_nodes);
  mix(torque_nodes);
  return detail::hex64(h);
}

std::string map_fingerprint(const EfficiencyMap& map) {
  const std::string csv = map_to_csv(map);
  return detail::hex64(detail::fnv1a(csv.data(), csv.size()));
}

EfficiencyMap synthesize_map(const MapSynthesisSpec& spec) {
  spec.validate();
  auto speeds = spaced_axis(spec.max_rpm, spec.speed_nodes);
  auto torques = spaced_axis(spec.max_torque_nm, spec.torque_nodes, spec.torque_axis_exponent);
  const double span = spec.peak_efficiency - spec.floor_efficiency;
  std::vector<double> shape;
  shape.reserve(speeds.size() * torques.size());
  if (spec.family == SurfaceFamily::kBumpProduct) {
    const auto s = profile(speeds, spec.peak_speed_frac * spec.max_rpm, spec.speed_rise,
                           spec.speed_fall);
    const auto q = profile(torques, spec.peak_torque_frac * spec.max_torque_nm,
                           spec.torque_rise, spec.torque_fall);
    for (double si : s) {
      for (double qj : q) shape.push_back(si * qj);
    }
  } else {
    const LossModel model(spec.peak_speed_frac, spec.peak_torque_frac, spec.fixed_loss,
                          spec.loss_scale);
    for (double n : speeds) {
      for (double t : torques) shape.push_back(model(n / spec.max_rpm, t / spec.max_torque_nm));
    }
    const double top = *std::max_element(shape.begin(), shape.end());
    for (double& v : shape) v /= top;
  }
  std::vector<double> grid;
  grid.reserve(shape.size());
  // The argmax node is pinned to the requested peak so it is exact, not
  // floor + (peak - floor) rounded.
  for (double v : shape) grid.push_back(v == 1.0 ? spec.peak_efficiency : spec.floor_efficiency + span * v);
  EfficiencyMap map(spec.mode, std::move(speeds), std::move(torques), std::move(grid));
  if (spec.min_area_fraction > 0.0) {
    const double area = map_area_stats(map, spec.area_threshold);
    if (area < spec.min_area_fraction) {
      throw CalibrationError("synthesized " + std::string(to_string(spec.mode)) + " map has " +
                             fmt_num(area * 100.0) + "% of its area above " +
                             fmt_num(spec.area_threshold) + ", target is " +
                             fmt_num(spec.min_area_fraction * 100.0) + "%");
    }
  }
  return map;
}

EfficiencyMap synthesize_motoring_map(MapSynthesisSpec spec) {
  spec.mode = MapMode::kMotoring;
  return synthesize_map(spec);
}

EfficiencyMap synthesize_braking_map(MapSynthesisSpec spec) {
  spec.mode = MapMode::kBraking;
  return synthesize_map(spec);
}

double efficiency_from_losses(double electromagnetic_power_w, double copper_loss_w,
                              double core_loss_w, double magnet_loss_w) {
  if (!(electromagnetic_power_w > 0.0)) {
    throw DomainError("electromagnetic power must be > 0 W");
  }
  if (copper_loss_w < 0.0 || core_loss_w < 0.0 || magnet_loss_w < 0.0) {
    throw DomainError("losses must be >= 0 W");
  }
  const double losses = copper_loss_w + core_loss_w + magnet_loss_w;
  if (losses > electromagnetic_power_w) {
    throw DomainError("losses (" + fmt_num(losses) + " W) exceed electromagnetic power (" +
                      fmt_num(electromagnetic_power_w) + " W)");
  }
  return 1.0 - losses / electromagnetic_power_w;
}

double map_area_stats(const EfficiencyMap& map, double threshold) {
  const auto values = map.values();
  const auto above = std::count_if(values.begin(), values.end(),
                                   [threshold](double v) { return v > threshold; });
  return static_cast<double>(above) / static_cast<double>(values.size());
}

}  // namespace wheelsim

namespace wheelsim {

// Defaults below were fitted so that the drive-strategy and cycle outputs land
// near published figures for a 2-motor in-wheel car; see README.

MapSynthesisSpec MapSynthesisSpec::motoring_default() {
  MapSynthesisSpec s;
  s.family = SurfaceFamily::kLossModel;
  s.peak_speed_frac = 0.79036;
  s.peak_torque_frac = 0.40232;
  s.loss_scale = 0.0088378;
  s.fixed_loss = 0.159383;
  s.floor_efficiency = 0.12810;
  s.torque_axis_exponent = 1.40136;
  return s;
}

MapSynthesisSpec MapSynthesisSpec::braking_default() {
  MapSynthesisSpec s;
  s.mode = MapMode::kBraking;
  s.peak_efficiency = 0.91;
  s.floor_efficiency = 0.46644;
  s.peak_speed_frac = 0.72388;
  s.peak_torque_frac = 0.35490;
  s.speed_rise = 0.28672;
  s.speed_fall = 3.47441;
  s.torque_rise = 0.28049;
  s.torque_fall = 3.33875;
  s.torque_axis_exponent = 1.40136;
  s.min_area_fraction = 0.0;
  return s;
}

MapSynthesisSpec MapSynthesisSpec::baseline_default() {
  MapSynthesisSpec s = motoring_default();
  s.peak_efficiency = 0.89;
  s.loss_scale = 0.0033765;
  s.fixed_loss = 0.139632;
  s.floor_efficiency = 0.74333;
  s.min_area_fraction = 0.0;
  return s;
}

}  // namespace wheelsim
