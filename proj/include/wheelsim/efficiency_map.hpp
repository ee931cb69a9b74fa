#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wheelsim {

enum class MapMode { kMotoring, kBraking };

std::string_view to_string(MapMode mode);
MapMode map_mode_from_string(std::string_view name);

/// Highest efficiency a map of the given mode may contain.
double mode_ceiling(MapMode mode);

/// Motor efficiency over a rectangular (speed, torque) grid. Immutable after
/// construction; lookups interpolate bilinearly inside the enclosing cell.
class EfficiencyMap {
 public:
  /// `grid` is speed-major: grid[i * torque_axis.size() + j] is the value at
  /// (speed_axis[i], torque_axis[j]). Throws DomainError on broken invariants.
  EfficiencyMap(MapMode mode, std::vector<double> speed_axis_rpm,
                std::vector<double> torque_axis_nm, std::vector<double> grid);

  MapMode mode() const { return mode_; }
  std::span<const double> speed_axis() const { return speed_axis_; }
  std::span<const double> torque_axis() const { return torque_axis_; }
  std::span<const double> values() const { return grid_; }
  std::size_t speed_nodes() const { return speed_axis_.size(); }
  std::size_t torque_nodes() const { return torque_axis_.size(); }

  double at(std::size_t speed_index, std::size_t torque_index) const {
    return grid_[speed_index * torque_axis_.size() + torque_index];
  }

  double max_rpm() const { return speed_axis_.back(); }
  double max_torque_nm() const { return torque_axis_.back(); }
  double max_value() const;
  /// Smallest strictly positive node value; used as the dead-band efficiency.
  double floor_value() const;

  /// Bilinear lookup. Throws DomainError when (rpm, torque) is off the map.
  double lookup(double rpm, double torque_nm) const;

  bool operator==(const EfficiencyMap&) const = default;

 private:
  MapMode mode_;
  std::vector<double> speed_axis_;
  std::vector<double> torque_axis_;
  std::vector<double> grid_;
};

/// Shape families for synthesized maps.
enum class SurfaceFamily {
  // floor + (peak - floor) * S(n) * Q(T), with S and Q one-sided power-law
  // bumps (x e^(1-x))^p normalized to 1 at their grid maximum.
  kBumpProduct,
  // floor + (peak - floor) * E(n, T) / max E, where E = P / (P + losses) for
  // output power P ~ n T and losses ~ a T^2 + b n + n^3 + d (copper, iron,
  // windage, fixed). a and b are solved so that E peaks at the requested
  // location, which moves the best-efficiency speed up as torque grows.
  kLossModel,
};

std::string_view to_string(SurfaceFamily family);
SurfaceFamily surface_family_from_string(std::string_view name);

/// Parameters of a smooth single-peak efficiency surface.
struct MapSynthesisSpec {
  MapMode mode = MapMode::kMotoring;
  SurfaceFamily family = SurfaceFamily::kBumpProduct;
  double peak_efficiency = 0.945;
  double floor_efficiency = 0.55;
  double peak_speed_frac = 0.45;
  double peak_torque_frac = 0.35;
  // kBumpProduct exponents. Larger values decay faster toward the boundary
  // on that side of the peak.
  double speed_rise = 1.0;
  double speed_fall = 1.0;
  double torque_rise = 1.0;
  double torque_fall = 1.0;
  // kLossModel: overall loss level (small = broad plateau) and the fixed
  // loss term d, in units of the windage loss at full speed. d must not
  // exceed peak_speed_frac^3 / 2.
  double loss_scale = 0.05;
  double fixed_loss = 0.0;
  int speed_nodes = 33;
  int torque_nodes = 26;
  // Torque node j sits at max_torque * (j / (torque_nodes - 1))^exponent;
  // values above 1 pack nodes toward zero torque.
  double torque_axis_exponent = 1.0;
  double max_rpm = 1600.0;
  double max_torque_nm = 1250.0;
  // Calibration target: at least `min_area_fraction` of nodes above
  // `area_threshold`. A min_area_fraction of 0 disables the check.
  double area_threshold = 0.60;
  double min_area_fraction = 0.90;

  /// Throws ConfigError on invalid fields.
  void validate() const;
  /// Stable 64-bit FNV-1a hash over every field, hex encoded.
  std::string fingerprint() const;

  bool operator==(const MapSynthesisSpec&) const = default;

  static MapSynthesisSpec motoring_default();
  static MapSynthesisSpec braking_default();
  /// Conventional geared motor of the baseline EV.
  static MapSynthesisSpec baseline_default();
};

EfficiencyMap synthesize_map(const MapSynthesisSpec& spec);
/// synthesize_map with the mode forced to motoring / braking.
EfficiencyMap synthesize_motoring_map(MapSynthesisSpec spec = MapSynthesisSpec::motoring_default());
EfficiencyMap synthesize_braking_map(MapSynthesisSpec spec = MapSynthesisSpec::braking_default());

/// 1 - (P_Cu + P_Fe + P_mag) / P_e.
double efficiency_from_losses(double electromagnetic_power_w, double copper_loss_w,
                              double core_loss_w, double magnet_loss_w);

/// Fraction of grid nodes whose value is strictly above `threshold`.
double map_area_stats(const EfficiencyMap& map, double threshold);

/// CSV layout: first row "rpm\torque", t0, t1, ...; then one row per speed
/// node: n_i, value(i, 0), value(i, 1), ...
void save_map(const EfficiencyMap& map, const std::filesystem::path& path);
EfficiencyMap load_map(const std::filesystem::path& path, MapMode mode);
std::string map_to_csv(const EfficiencyMap& map);
EfficiencyMap map_from_csv(std::string_view text, MapMode mode, std::string_view source = "<memory>");

/// Hash of the map's CSV form; identifies maps loaded from files.
std::string map_fingerprint(const EfficiencyMap& map);

/// The node marker written in the corner cell of a map CSV.
inline constexpr std::string_view kMapCornerMarker = "rpm\\torque";

}  // namespace wheelsim
