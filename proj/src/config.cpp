#include "wheelsim/config.hpp"

#include <cstdlib>
#include <set>
#include <string>

#include "text_util.hpp"
#include "wheelsim/error.hpp"

#ifndef WHEELSIM_DATA_DIR
#define WHEELSIM_DATA_DIR "data"
#endif

namespace wheelsim {

using nlohmann::json;

namespace {

// Reads one JSON object field by field and rejects keys nobody asked for,
// so a misspelled `mass_kgs` fails loudly instead of silently using the
// default.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + " has the wrong type (" + j_.at(key).dump() + ")");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key = {}) const {
    if (key.empty()) return path_.empty() ? "config" : "'" + path_ + "'";
    return "'" + (path_.empty() ? key : path_ + "." + key) + "'";
  }
  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown config key " + where(key));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string_view to_string(ClassifierSpeed c) {
  return c == ClassifierSpeed::kInitialSpeed ? "initial_speed" : "swept_speed";
}

ClassifierSpeed classifier_from_string(const std::string& s) {
  if (s == "initial_speed") return ClassifierSpeed::kInitialSpeed;
  if (s == "swept_speed") return ClassifierSpeed::kSweptSpeed;
  throw ConfigError("strategy.classifier_speed must be initial_speed|swept_speed, got '" + s + "'");
}

void read_vehicle(const json& j, const std::string& path, VehicleParams& p) {
  Reader r(j, path);
  r.get("mass_kg", p.mass_kg);
  r.get("rotating_mass_kg", p.rotating_mass_kg);
  r.get("frontal_area_m2", p.frontal_area_m2);
  r.get("drag_coeff", p.drag_coeff);
  r.get("tire_radius_m", p.tire_radius_m);
  r.get("rolling_coeff", p.rolling_coeff);
  r.get("battery_charge_eff", p.battery_charge_eff);
  r.get("battery_discharge_eff", p.battery_discharge_eff);
  r.get("transmission_eff", p.transmission_eff);
  r.get("inverter_eff", p.inverter_eff);
  r.get("brake_recovery_rate", p.brake_recovery_rate);
  r.get("sscm_power_w", p.sscm_power_w);
  r.get("max_motor_rpm", p.max_motor_rpm);
  r.get("max_motor_torque_nm", p.max_motor_torque_nm);
  r.get("motor_count", p.motor_count);
  r.finish();
}

void read_spec(const json& j, const std::string& path, MapSynthesisSpec& s) {
  Reader r(j, path);
  std::string family(to_string(s.family));
  r.get("family", family);
  try {
    s.family = surface_family_from_string(family);
  } catch (const Error&) {
    throw ConfigError(r.where("family") + " must be bump_product|loss_model, got '" + family + "'");
  }
  r.get("peak_efficiency", s.peak_efficiency);
  r.get("floor_efficiency", s.floor_efficiency);
  r.get("peak_speed_frac", s.peak_speed_frac);
  r.get("peak_torque_frac", s.peak_torque_frac);
  r.get("speed_rise", s.speed_rise);
  r.get("speed_fall", s.speed_fall);
  r.get("torque_rise", s.torque_rise);
  r.get("torque_fall", s.torque_fall);
  r.get("loss_scale", s.loss_scale);
  r.get("fixed_loss", s.fixed_loss);
  r.get("speed_nodes", s.speed_nodes);
  r.get("torque_nodes", s.torque_nodes);
  r.get("torque_axis_exponent", s.torque_axis_exponent);
  r.get("max_rpm", s.max_rpm);
  r.get("max_torque_nm", s.max_torque_nm);
  r.get("area_threshold", s.area_threshold);
  r.get("min_area_fraction", s.min_area_fraction);
  r.finish();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

void read_map_source(const json& j, const std::string& path, const std::filesystem::path& base,
                     MapSource& src, MapMode mode) {
  Reader r(j, path);
  const json* file = r.child("file");
  const json* synth = r.child("synth");
  r.finish();
  if ((file != nullptr) == (synth != nullptr)) {
    throw ConfigError("'" + path + "' needs exactly one of 'file' or 'synth'");
  }
  if (file) {
    if (!file->is_string()) throw ConfigError("'" + path + ".file' must be a string");
    src.file = resolve(base, file->get<std::string>());
  } else {
    src.file.reset();
    read_spec(*synth, path + ".synth", src.synth);
  }
  src.synth.mode = mode;
}

SlopeScenario read_scenario(const json& j, const std::string& path) {
  SlopeScenario s;
  Reader r(j, path);
  r.get("slope_deg", s.slope_deg);
  r.get("initial_speed_kmh", s.initial_speed_kmh);
  r.get("distance_km", s.distance_km);
  r.get("cargo_kg", s.cargo_kg);
  r.get("accel_m_s2", s.accel_m_s2);
  r.finish();
  return s;
}

void check_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError("'" + path + "' must be an array");
}

json to_json(const Environment& e) {
  return {{"air_density_kg_m3", e.air_density_kg_m3}, {"gravity_m_s2", e.gravity_m_s2}};
}

json to_json(const MapSource& src) {
  if (src.file) return {{"file", src.file->generic_string()}};
  return {{"synth", to_json(src.synth)}};
}

json to_json(const SlopeScenario& s) {
  return {{"slope_deg", s.slope_deg},   {"initial_speed_kmh", s.initial_speed_kmh},
          {"distance_km", s.distance_km}, {"cargo_kg", s.cargo_kg},
          {"accel_m_s2", s.accel_m_s2}};
}

}  // namespace

EfficiencyMap MapSource::build() const {
  if (file) return load_map(*file, synth.mode);
  return synthesize_map(synth);
}

std::string MapSource::fingerprint() const {
  if (file) return "file:" + map_fingerprint(build());
  return synth.fingerprint();
}

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.motoring_map.synth = MapSynthesisSpec::motoring_default();
  c.braking_map.synth = MapSynthesisSpec::braking_default();
  c.baseline_map.synth = MapSynthesisSpec::baseline_default();
  for (double slope : {5.0, 10.0, 15.0, -5.0, -10.0, -15.0, -0.2, -0.5, -0.8, 0.0}) {
    SlopeScenario s;
    s.slope_deg = slope;
    c.scenarios.push_back(s);
  }
  const std::filesystem::path data(WHEELSIM_DATA_DIR);
  c.cycles = {{data / "cycles" / "udds.csv", SpeedUnit::kMph},
              {data / "cycles" / "hwfet.csv", SpeedUnit::kMph}};
  return c;
}

void RunConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) {
    throw ConfigError("unsupported config schema_version " + std::to_string(schema_version) +
                      " (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }
  vehicle.validate();
  baseline_vehicle.validate();
  environment.validate();
  for (const MapSource* src : {&motoring_map, &braking_map, &baseline_map}) {
    if (!src->file) src->synth.validate();
  }
  regen.validate();
  if (scenarios.empty() && cycles.empty()) {
    throw ConfigError("config lists no scenarios and no cycles");
  }
  for (const auto& s : scenarios) s.validate();
  if (!(grid.vmin_kmh > 0.0 && grid.vmin_kmh < grid.vmax_kmh && grid.step_kmh > 0.0 &&
        grid.refine_step_kmh >= 0.0)) {
    throw ConfigError("strategy.grid needs 0 < vmin_kmh < vmax_kmh, step_kmh > 0, refine_step_kmh >= 0");
  }
  case_study.validate();
  for (const auto& c : sscm_components) c.validate();
}

MotorMaps RunConfig::build_maps() const { return {motoring_map.build(), braking_map.build()}; }

DriveModel RunConfig::iwm_model() const {
  return DriveModel(vehicle, environment, build_maps(), classifier);
}

DriveModel RunConfig::baseline_model() const {
  const EfficiencyMap map = baseline_map.build();
  return DriveModel(baseline_vehicle, environment, MotorMaps{map, map}, classifier);
}

RunConfig parse_config(std::string_view json_text, std::string_view source,
                       const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(source) + ": invalid JSON: " + e.what());
  }

  RunConfig c = RunConfig::defaults();
  Reader r(j, "");
  r.get("schema_version", c.schema_version);
  if (const json* v = r.child("vehicle")) read_vehicle(*v, "vehicle", c.vehicle);
  if (const json* v = r.child("baseline_vehicle")) read_vehicle(*v, "baseline_vehicle", c.baseline_vehicle);
  if (const json* e = r.child("environment")) {
    Reader er(*e, "environment");
    er.get("air_density_kg_m3", c.environment.air_density_kg_m3);
    er.get("gravity_m_s2", c.environment.gravity_m_s2);
    er.finish();
  }
  if (const json* m = r.child("maps")) {
    Reader mr(*m, "maps");
    if (const json* x = mr.child("motoring")) {
      read_map_source(*x, "maps.motoring", base_dir, c.motoring_map, MapMode::kMotoring);
    }
    if (const json* x = mr.child("braking")) {
      read_map_source(*x, "maps.braking", base_dir, c.braking_map, MapMode::kBraking);
    }
    if (const json* x = mr.child("baseline")) {
      read_map_source(*x, "maps.baseline", base_dir, c.baseline_map, MapMode::kMotoring);
    }
    mr.finish();
  }
  if (const json* s = r.child("strategy")) {
    Reader sr(*s, "strategy");
    std::string classifier(to_string(c.classifier));
    sr.get("classifier_speed", classifier);
    c.classifier = classifier_from_string(classifier);
    if (const json* g = sr.child("grid")) {
      Reader gr(*g, "strategy.grid");
      gr.get("vmin_kmh", c.grid.vmin_kmh);
      gr.get("vmax_kmh", c.grid.vmax_kmh);
      gr.get("step_kmh", c.grid.step_kmh);
      gr.get("refine_step_kmh", c.grid.refine_step_kmh);
      gr.finish();
    }
    sr.finish();
  }
  if (const json* g = r.child("regen")) {
    Reader gr(*g, "regen");
    gr.get("recovery_fraction", c.regen.recovery_fraction);
    if (const json* eff = gr.child("chain_eff"); eff && !eff->is_null()) {
      if (!eff->is_number()) throw ConfigError("'regen.chain_eff' must be a number or null");
      c.regen.chain_eff = eff->get<double>();
    }
    gr.finish();
  }
  if (const json* s = r.child("scenarios")) {
    check_array(*s, "scenarios");
    c.scenarios.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      c.scenarios.push_back(read_scenario((*s)[i], "scenarios." + std::to_string(i)));
    }
  }
  if (const json* cy = r.child("cycles")) {
    check_array(*cy, "cycles");
    c.cycles.clear();
    for (std::size_t i = 0; i < cy->size(); ++i) {
      const std::string path = "cycles." + std::to_string(i);
      Reader cr((*cy)[i], path);
      std::string file;
      std::string unit = "mph";
      cr.get("file", file);
      cr.get("unit", unit);
      cr.finish();
      if (file.empty()) throw ConfigError("'" + path + ".file' is required");
      c.cycles.push_back({resolve(base_dir, file), speed_unit_from_string(unit)});
    }
  }
  if (const json* cs = r.child("case_study")) {
    Reader cr(*cs, "case_study");
    cr.get("slope_deg", c.case_study.slope_deg);
    cr.get("leg_distance_km", c.case_study.leg_distance_km);
    cr.get("baseline_raw_wh_per_km", c.case_study.baseline_raw_wh_per_km);
    cr.get("baseline_speed_kmh", c.case_study.baseline_speed_kmh);
    cr.get("driver_mass_kg", c.case_study.driver_mass_kg);
    if (const json* sh = cr.child("shares")) {
      Reader shr(*sh, "case_study.shares");
      shr.get("acceleration", c.case_study.shares.acceleration);
      shr.get("auxiliary", c.case_study.shares.auxiliary);
      shr.get("driver", c.case_study.shares.driver);
      shr.finish();
    }
    cr.finish();
  }
  if (const json* comps = r.child("sscm_components")) {
    check_array(*comps, "sscm_components");
    c.sscm_components.clear();
    for (std::size_t i = 0; i < comps->size(); ++i) {
      Reader cr((*comps)[i], "sscm_components." + std::to_string(i));
      SscmComponent comp;
      cr.get("name", comp.name);
      cr.get("model", comp.model);
      cr.get("power_w", comp.power_w);
      cr.get("mass_kg", comp.mass_kg);
      cr.get("count", comp.count);
      cr.finish();
      c.sscm_components.push_back(comp);
    }
  }
  std::string out_dir = c.output_dir.string();
  r.get("output_dir", out_dir);
  c.output_dir = out_dir;
  r.finish();

  c.case_study.grid = c.grid;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(detail::read_file(path), path.string(), path.parent_path());
}

void apply_overrides(json& config, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + item + "' must look like KEY=VALUE");
    }
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);

    json* node = &config;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw ConfigError("override key '" + key + "' has an empty segment");
      if (node->is_array()) {
        std::size_t idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoul(part, &used);
          if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
          throw ConfigError("override key '" + key + "': '" + part + "' is not an array index");
        }
        if (idx >= node->size()) {
          throw ConfigError("override key '" + key + "': index " + part + " is out of range");
        }
        node = &(*node)[idx];
      } else if (node->is_object() || node->is_null()) {
        node = &(*node)[part];
      } else {
        throw ConfigError("override key '" + key + "': '" + part + "' is below a scalar");
      }
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    json value = json::parse(text, nullptr, false);
    *node = value.is_discarded() ? json(text) : value;
  }
}

std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path && !explicit_path->empty()) return explicit_path;
  if (const char* env = std::getenv("WHEELSIM_CONFIG"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::vector<std::string>& overrides) {
  if (path && overrides.empty()) return load_config(*path);
  json j;
  std::filesystem::path base;
  std::string source = "<defaults>";
  if (path) {
    try {
      j = json::parse(detail::read_file(*path));
    } catch (const json::parse_error& e) {
      throw ParseError(path->string() + ": invalid JSON: " + e.what());
    }
    base = path->parent_path();
    source = path->string();
  } else {
    j = config_to_json(RunConfig::defaults());
  }
  apply_overrides(j, overrides);
  return parse_config(j.dump(), source, base);
}

json to_json(const VehicleParams& p) {
  return {{"mass_kg", p.mass_kg},
          {"rotating_mass_kg", p.rotating_mass_kg},
          {"frontal_area_m2", p.frontal_area_m2},
          {"drag_coeff", p.drag_coeff},
          {"tire_radius_m", p.tire_radius_m},
          {"rolling_coeff", p.rolling_coeff},
          {"battery_charge_eff", p.battery_charge_eff},
          {"battery_discharge_eff", p.battery_discharge_eff},
          {"transmission_eff", p.transmission_eff},
          {"inverter_eff", p.inverter_eff},
          {"brake_recovery_rate", p.brake_recovery_rate},
          {"sscm_power_w", p.sscm_power_w},
          {"max_motor_rpm", p.max_motor_rpm},
          {"max_motor_torque_nm", p.max_motor_torque_nm},
          {"motor_count", p.motor_count}};
}

json to_json(const MapSynthesisSpec& s) {
  return {{"family", std::string(to_string(s.family))},
          {"peak_efficiency", s.peak_efficiency},
          {"floor_efficiency", s.floor_efficiency},
          {"peak_speed_frac", s.peak_speed_frac},
          {"peak_torque_frac", s.peak_torque_frac},
          {"speed_rise", s.speed_rise},
          {"speed_fall", s.speed_fall},
          {"torque_rise", s.torque_rise},
          {"torque_fall", s.torque_fall},
          {"loss_scale", s.loss_scale},
          {"fixed_loss", s.fixed_loss},
          {"speed_nodes", s.speed_nodes},
          {"torque_nodes", s.torque_nodes},
          {"torque_axis_exponent", s.torque_axis_exponent},
          {"max_rpm", s.max_rpm},
          {"max_torque_nm", s.max_torque_nm},
          {"area_threshold", s.area_threshold},
          {"min_area_fraction", s.min_area_fraction}};
}

json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["vehicle"] = to_json(c.vehicle);
  j["baseline_vehicle"] = to_json(c.baseline_vehicle);
  j["environment"] = to_json(c.environment);
  j["maps"] = {{"motoring", to_json(c.motoring_map)},
               {"braking", to_json(c.braking_map)},
               {"baseline", to_json(c.baseline_map)}};
  j["strategy"] = {{"classifier_speed", std::string(to_string(c.classifier))},
                   {"grid",
                    {{"vmin_kmh", c.grid.vmin_kmh},
                     {"vmax_kmh", c.grid.vmax_kmh},
                     {"step_kmh", c.grid.step_kmh},
                     {"refine_step_kmh", c.grid.refine_step_kmh}}}};
  j["regen"] = {{"recovery_fraction", c.regen.recovery_fraction},
                {"chain_eff", c.regen.chain_eff ? json(*c.regen.chain_eff) : json(nullptr)}};
  j["scenarios"] = json::array();
  for (const auto& s : c.scenarios) j["scenarios"].push_back(to_json(s));
  j["cycles"] = json::array();
  for (const auto& cy : c.cycles) {
    j["cycles"].push_back({{"file", cy.file.generic_string()}, {"unit", std::string(to_string(cy.unit))}});
  }
  const auto& cs = c.case_study;
  j["case_study"] = {{"slope_deg", cs.slope_deg},
                     {"leg_distance_km", cs.leg_distance_km},
                     {"baseline_raw_wh_per_km", cs.baseline_raw_wh_per_km},
                     {"baseline_speed_kmh", cs.baseline_speed_kmh},
                     {"driver_mass_kg", cs.driver_mass_kg},
                     {"shares",
                      {{"acceleration", cs.shares.acceleration},
                       {"auxiliary", cs.shares.auxiliary},
                       {"driver", cs.shares.driver}}}};
  j["sscm_components"] = json::array();
  for (const auto& comp : c.sscm_components) {
    j["sscm_components"].push_back({{"name", comp.name},
                                    {"model", comp.model},
                                    {"power_w", comp.power_w},
                                    {"mass_kg", comp.mass_kg},
                                    {"count", comp.count}});
  }
  j["output_dir"] = c.output_dir.generic_string();
  return j;
}

}  // namespace wheelsim
