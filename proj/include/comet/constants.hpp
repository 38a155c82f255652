#pragma once

#include <numbers>

// Internal units: micrometres, radians, seconds.
namespace comet {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Speed of light in vacuum, µm/s.
inline constexpr double kSpeedOfLight = 2.99792458e14;

inline constexpr double kMicronsPerMillimetre = 1.0e3;
inline constexpr double kNanometresPerMicron = 1.0e3;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Angular frequency (rad/s) of vacuum wavelength `lambda_um`.
constexpr double angular_frequency(double lambda_um) { return kTwoPi * kSpeedOfLight / lambda_um; }

}  // namespace comet
