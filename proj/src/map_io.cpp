#include <string>

#include "text_util.hpp"
#include "wheelsim/efficiency_map.hpp"
#include "wheelsim/error.hpp"

namespace wheelsim {
namespace {

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, std::size_t column,
                             const std::string& what) {
  throw ParseError(std::string(source) + ": line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ": " + what);
}

}  // namespace

std::string map_to_csv(const EfficiencyMap& map) {
  std::string out(kMapCornerMarker);
  for (double t : map.torque_axis()) {
    out += ',';
    out += detail::format_double(t);
  }
  out += '\n';
  for (std::size_t i = 0; i < map.speed_nodes(); ++i) {
    out += detail::format_double(map.speed_axis()[i]);
    for (std::size_t j = 0; j < map.torque_nodes(); ++j) {
      out += ',';
      out += detail::format_double(map.at(i, j));
    }
    out += '\n';
  }
  return out;
}

EfficiencyMap map_from_csv(std::string_view text, MapMode mode, std::string_view source) {
  auto rows = detail::lines(text);
  while (!rows.empty() && detail::trim(rows.back()).empty()) rows.pop_back();
  if (rows.size() < 3) parse_fail(source, rows.size(), 1, "need a header row and at least 2 speed rows");

  const auto header = detail::split(rows[0]);
  if (header.empty() || header[0] != kMapCornerMarker) {
    parse_fail(source, 1, 1, "corner cell must be '" + std::string(kMapCornerMarker) + "'");
  }
  std::vector<double> torques;
  for (std::size_t c = 1; c < header.size(); ++c) {
    auto v = detail::parse_double(header[c]);
    if (!v) parse_fail(source, 1, c + 1, "torque value '" + std::string(header[c]) + "' is not a number");
    if (!torques.empty() && !(*v > torques.back())) {
      parse_fail(source, 1, c + 1, "torque axis must be strictly increasing");
    }
    torques.push_back(*v);
  }
  if (torques.size() < 2) parse_fail(source, 1, header.size(), "torque axis needs at least 2 points");

  std::vector<double> speeds;
  std::vector<double> grid;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t line = r + 1;
    const auto cells = detail::split(rows[r]);
    if (cells.size() != torques.size() + 1) {
      parse_fail(source, line, cells.size(),
                 "ragged row: " + std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(torques.size() + 1));
    }
    auto n = detail::parse_double(cells[0]);
    if (!n) parse_fail(source, line, 1, "speed value '" + std::string(cells[0]) + "' is not a number");
    if (!speeds.empty() && !(*n > speeds.back())) {
      parse_fail(source, line, 1, "speed axis must be strictly increasing");
    }
    speeds.push_back(*n);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      auto v = detail::parse_double(cells[c]);
      if (!v) parse_fail(source, line, c + 1, "efficiency '" + std::string(cells[c]) + "' is not a number");
      if (!(*v >= 0.0 && *v <= 1.0)) {
        parse_fail(source, line, c + 1, "efficiency " + std::string(cells[c]) + " outside [0, 1]");
      }
      grid.push_back(*v);
    }
  }
  try {
    return EfficiencyMap(mode, std::move(speeds), std::move(torques), std::move(grid));
  } catch (const DomainError& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
}

void save_map(const EfficiencyMap& map, const std::filesystem::path& path) {
  detail::write_file(path, map_to_csv(map));
}

EfficiencyMap load_map(const std::filesystem::path& path, MapMode mode) {
  return map_from_csv(detail::read_file(path), mode, path.string());
}

}  // namespace wheelsim
