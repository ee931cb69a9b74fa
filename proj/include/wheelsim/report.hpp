#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "wheelsim/case_study.hpp"
#include "wheelsim/config.hpp"
#include "wheelsim/cycle.hpp"
#include "wheelsim/drive_strategy.hpp"

namespace wheelsim {

/// Common report envelope: schema version, report kind and the fingerprints
/// of the maps that produced it.
nlohmann::json report_header(std::string_view kind, const RunConfig& config);

nlohmann::json to_json(const OperatingPoint& pt);
/// Scenario, regime and optimum; the full curve goes to CSV instead.
nlohmann::json to_json(const SpeedSweep& sweep);
/// Summary only, the per-step trace is left out.
nlohmann::json to_json(const CycleResult& result);
nlohmann::json to_json(const CaseStudyReport& report);

OperatingPoint operating_point_from_json(const nlohmann::json& j);
CycleResult cycle_result_from_json(const nlohmann::json& j);
CaseStudyReport case_study_from_json(const nlohmann::json& j);

/// Pretty-printed JSON plus a trailing newline. Keys are sorted, so equal
/// inputs give byte-identical files. Throws IoError.
void emit_report(const nlohmann::json& report, const std::filesystem::path& path);
std::string report_text(const nlohmann::json& report);

/// Reads a report back; throws ParseError on bad JSON or an unknown schema.
nlohmann::json read_report(const std::filesystem::path& path);
nlohmann::json parse_report(std::string_view text, std::string_view source = "<memory>");

/// Columns: speed_kmh,rpm,torque_nm,eta,energy_wh_per_km,feasible. One row
/// per sweep point; energy is empty for infeasible points.
std::string curve_csv(const SpeedSweep& sweep);
void emit_curve(const SpeedSweep& sweep, const std::filesystem::path& path);

}  // namespace wheelsim
