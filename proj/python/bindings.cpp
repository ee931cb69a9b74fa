#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wheelsim/case_study.hpp"
#include "wheelsim/config.hpp"
#include "wheelsim/error.hpp"
#include "wheelsim/report.hpp"

namespace py = pybind11;
using namespace wheelsim;
using nlohmann::json;

namespace {

// Results cross the boundary as plain dicts, in the same shape as the JSON
// reports the CLI writes.
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

SlopeScenario scenario(double slope_deg, double cargo_kg, double initial_speed_kmh) {
  SlopeScenario s;
  s.slope_deg = slope_deg;
  s.cargo_kg = cargo_kg;
  s.initial_speed_kmh = initial_speed_kmh;
  s.validate();
  return s;
}

class Simulator {
 public:
  Simulator(std::optional<std::filesystem::path> config_path, std::vector<std::string> overrides)
      : config_(load_run_config(config_path, overrides)),
        iwm_(config_.iwm_model()),
        baseline_(config_.baseline_model()) {}

  py::object config() const { return to_py(config_to_json(config_)); }

  double demand_torque_nm(double speed_kmh, double slope_deg, double accel_m_s2, double cargo_kg) const {
    return demand_torque(state(speed_kmh, slope_deg, accel_m_s2, cargo_kg), config_.vehicle, config_.environment);
  }

  std::string drive_state(double speed_kmh, double slope_deg, double cargo_kg) const {
    return std::string(to_string(
        classify_drive_state(state(speed_kmh, slope_deg, 0.0, cargo_kg), config_.vehicle, config_.environment)));
  }

  double energy_per_km(double speed_kmh, double slope_deg, double cargo_kg, double initial_speed_kmh) const {
    return iwm_.energy_per_km(speed_kmh, scenario(slope_deg, cargo_kg, initial_speed_kmh));
  }

  py::object evaluate(double speed_kmh, double slope_deg, double cargo_kg, double initial_speed_kmh) const {
    return to_py(to_json(iwm_.evaluate(speed_kmh, scenario(slope_deg, cargo_kg, initial_speed_kmh))));
  }

  py::object optimal_speed(double slope_deg, double cargo_kg, double initial_speed_kmh) const {
    return to_py(to_json(iwm_.optimal_speed(scenario(slope_deg, cargo_kg, initial_speed_kmh), config_.grid)));
  }

  py::object sweep(double slope_deg, double cargo_kg, double initial_speed_kmh) const {
    const auto sweep = iwm_.sweep_speeds(scenario(slope_deg, cargo_kg, initial_speed_kmh), config_.grid);
    json j = to_json(sweep);
    j["curve"] = json::array();
    for (const auto& pt : sweep.points) j["curve"].push_back(to_json(pt));
    return to_py(j);
  }

  py::object run_cycle(const std::filesystem::path& path, const std::string& unit, bool baseline,
                       double grade_deg) const {
    const auto cycle = load_cycle(path, speed_unit_from_string(unit));
    CycleOptions opts;
    opts.grade_deg = grade_deg;
    if (baseline) {
      return to_py(to_json(simulate_baseline_cycle(cycle, config_.baseline_vehicle, config_.environment,
                                                   baseline_.maps().motoring, config_.regen, opts)));
    }
    return to_py(to_json(simulate_cycle(cycle, config_.vehicle, config_.environment, iwm_.maps(), config_.regen, opts)));
  }

  std::vector<std::string> bundled_cycles() const {
    std::vector<std::string> out;
    for (const auto& c : config_.cycles) out.push_back(c.file.string());
    return out;
  }

  py::object case_study() const { return to_py(to_json(run_case_study(config_.case_study, iwm_, baseline_))); }

  py::dict sscm_totals() const {
    const auto t = sscm_aggregate(config_.sscm_components);
    py::dict d;
    d["power_w"] = t.power_w;
    d["mass_kg"] = t.mass_kg;
    return d;
  }

  const EfficiencyMap& motoring_map() const { return iwm_.maps().motoring; }
  const EfficiencyMap& braking_map() const { return iwm_.maps().braking; }

 private:
  static MotionState state(double speed_kmh, double slope_deg, double accel_m_s2, double cargo_kg) {
    MotionState s;
    s.speed_kmh = speed_kmh;
    s.slope_deg = slope_deg;
    s.accel_m_s2 = accel_m_s2;
    s.cargo_kg = cargo_kg;
    s.validate();
    return s;
  }

  RunConfig config_;
  DriveModel iwm_;
  DriveModel baseline_;
};

}  // namespace

PYBIND11_MODULE(_wheelsim, m) {
  m.doc() = "In-wheel-motor EV energy simulator";

  auto base = py::register_exception<Error>(m, "WheelsimError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<StateError>(m, "StateError", base.ptr());
  py::register_exception<CalibrationError>(m, "CalibrationError", base.ptr());

  m.def("wheel_rpm", &wheel_rpm, py::arg("speed_kmh"), py::arg("tire_radius_m"));
  m.def("adjust_baseline", [](double raw, double acceleration, double auxiliary, double driver) {
    return adjust_baseline(raw, {acceleration, auxiliary, driver});
  }, py::arg("raw_wh_per_km"), py::arg("acceleration") = 0.173, py::arg("auxiliary") = 0.027, py::arg("driver") = 0.069);

  py::class_<EfficiencyMap>(m, "EfficiencyMap")
      .def_property_readonly("mode", [](const EfficiencyMap& e) { return std::string(to_string(e.mode())); })
      .def_property_readonly("speed_axis", [](const EfficiencyMap& e) {
        return std::vector<double>(e.speed_axis().begin(), e.speed_axis().end());
      })
      .def_property_readonly("torque_axis", [](const EfficiencyMap& e) {
        return std::vector<double>(e.torque_axis().begin(), e.torque_axis().end());
      })
      .def("at", &EfficiencyMap::at, py::arg("speed_index"), py::arg("torque_index"))
      .def("lookup", &EfficiencyMap::lookup, py::arg("rpm"), py::arg("torque_nm"))
      .def("max_value", &EfficiencyMap::max_value)
      .def("area_fraction", [](const EfficiencyMap& e, double threshold) { return map_area_stats(e, threshold); },
           py::arg("threshold") = 0.60)
      .def("to_csv", &map_to_csv)
      .def("fingerprint", &map_fingerprint);

  m.def("load_map", [](const std::filesystem::path& path, const std::string& mode) {
    return load_map(path, map_mode_from_string(mode));
  }, py::arg("path"), py::arg("mode") = "motoring");

  py::class_<Simulator>(m, "Simulator")
      .def(py::init<std::optional<std::filesystem::path>, std::vector<std::string>>(),
           py::arg("config_path") = py::none(), py::arg("overrides") = std::vector<std::string>{})
      .def("config", &Simulator::config)
      .def("demand_torque", &Simulator::demand_torque_nm, py::arg("speed_kmh"), py::arg("slope_deg") = 0.0,
           py::arg("accel_m_s2") = 0.0, py::arg("cargo_kg") = 0.0)
      .def("drive_state", &Simulator::drive_state, py::arg("speed_kmh"), py::arg("slope_deg"),
           py::arg("cargo_kg") = 0.0)
      .def("energy_per_km", &Simulator::energy_per_km, py::arg("speed_kmh"), py::arg("slope_deg") = 0.0,
           py::arg("cargo_kg") = 0.0, py::arg("initial_speed_kmh") = 30.0)
      .def("evaluate", &Simulator::evaluate, py::arg("speed_kmh"), py::arg("slope_deg") = 0.0,
           py::arg("cargo_kg") = 0.0, py::arg("initial_speed_kmh") = 30.0)
      .def("optimal_speed", &Simulator::optimal_speed, py::arg("slope_deg"), py::arg("cargo_kg") = 0.0,
           py::arg("initial_speed_kmh") = 30.0)
      .def("sweep", &Simulator::sweep, py::arg("slope_deg"), py::arg("cargo_kg") = 0.0,
           py::arg("initial_speed_kmh") = 30.0)
      .def("run_cycle", &Simulator::run_cycle, py::arg("path"), py::arg("unit") = "mph", py::arg("baseline") = false,
           py::arg("grade_deg") = 0.0)
      .def("bundled_cycles", &Simulator::bundled_cycles)
      .def("case_study", &Simulator::case_study)
      .def("sscm_totals", &Simulator::sscm_totals)
      .def_property_readonly("motoring_map", &Simulator::motoring_map, py::return_value_policy::reference_internal)
      .def_property_readonly("braking_map", &Simulator::braking_map, py::return_value_policy::reference_internal);
}
