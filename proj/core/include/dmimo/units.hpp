#pragma once

#include <cmath>
#include <numbers>

namespace dmimo::units {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s
inline constexpr double kEarthRadius = 6371e3;    // m
inline constexpr double kPi = std::numbers::pi;

// Power quantities only: 10 lg.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace dmimo::units
