#pragma once

#include <numbers>

// Unit conversions. Speeds are km/h at every public boundary and m/s inside
// force computations; everything else is SI.
namespace wheelsim::units {

inline constexpr double kKmhPerMs = 3.6;
inline constexpr double kKmhPerMph = 1.609344;
inline constexpr double kSecondsPerHour = 3600.0;

constexpr double kmh_to_ms(double kmh) { return kmh / kKmhPerMs; }
constexpr double ms_to_kmh(double ms) { return ms * kKmhPerMs; }
constexpr double mph_to_kmh(double mph) { return mph * kKmhPerMph; }
constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Joules to watt-hours.
constexpr double j_to_wh(double joules) { return joules / kSecondsPerHour; }

}  // namespace wheelsim::units
