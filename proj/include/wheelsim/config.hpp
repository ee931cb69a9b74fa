#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wheelsim/case_study.hpp"
#include "wheelsim/cycle.hpp"
#include "wheelsim/drive_strategy.hpp"
#include "wheelsim/efficiency_map.hpp"
#include "wheelsim/vehicle.hpp"

namespace wheelsim {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

/// Where one efficiency map comes from: a CSV file or a synthesis spec.
struct MapSource {
  std::optional<std::filesystem::path> file;
  MapSynthesisSpec synth;

  EfficiencyMap build() const;
  /// Spec fingerprint, or the CSV hash prefixed with "file:" for file maps.
  std::string fingerprint() const;
};

struct CycleEntry {
  std::filesystem::path file;
  SpeedUnit unit = SpeedUnit::kMph;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  VehicleParams vehicle = VehicleParams::iwm_aev();
  VehicleParams baseline_vehicle = VehicleParams::baseline();
  Environment environment;
  MapSource motoring_map;
  MapSource braking_map;
  MapSource baseline_map;
  ClassifierSpeed classifier = ClassifierSpeed::kInitialSpeed;
  SpeedGrid grid;
  RegenPolicy regen;
  std::vector<SlopeScenario> scenarios;
  std::vector<CycleEntry> cycles;
  CaseStudyConfig case_study;
  std::vector<SscmComponent> sscm_components = default_sscm_components();
  std::filesystem::path output_dir = "out";

  /// Built-in configuration: the reference car, default maps, the slope
  /// scenarios of the constant-speed study and the bundled cycles.
  static RunConfig defaults();

  /// Throws ConfigError on the first broken invariant.
  void validate() const;

  MotorMaps build_maps() const;
  DriveModel iwm_model() const;
  DriveModel baseline_model() const;
};

/// Parses a JSON config. Keys carry their unit in the name; unknown keys
/// are rejected. Relative file paths resolve against `base_dir`.
RunConfig parse_config(std::string_view json_text, std::string_view source = "<memory>",
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Applies `--params` style overrides to config JSON. Each entry is
/// `dotted.key=value`; value is read as JSON when it parses, else as a
/// string. Numeric array indices are allowed (`scenarios.0.slope_deg=2`).
void apply_overrides(nlohmann::json& config, const std::vector<std::string>& overrides);

/// Config file to use: the explicit path, else $WHEELSIM_CONFIG, else none.
std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& explicit_path);

/// Loads `path` (or the built-in defaults when empty), applies overrides
/// and validates.
RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::vector<std::string>& overrides = {});

nlohmann::json config_to_json(const RunConfig& config);

nlohmann::json to_json(const VehicleParams& p);
nlohmann::json to_json(const MapSynthesisSpec& s);

}  // namespace wheelsim
