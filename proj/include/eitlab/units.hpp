#pragma once

// The only place where ordinary frequencies (Hz) and angular frequencies
// (rad/s) are converted into one another. Every other header works in rad/s.

#include <numbers>
#include <optional>
#include <string_view>

namespace eitlab::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double speed_of_light = 299'792'458.0;  // m/s

constexpr double hz_to_rad(double hz) noexcept { return hz * two_pi; }
constexpr double rad_to_hz(double rad_per_s) noexcept { return rad_per_s / two_pi; }

constexpr double mhz_2pi(double mhz) noexcept { return hz_to_rad(mhz * 1e6); }
constexpr double ghz_2pi(double ghz) noexcept { return hz_to_rad(ghz * 1e9); }
constexpr double khz_2pi(double khz) noexcept { return hz_to_rad(khz * 1e3); }

// Frequency unit suffixes accepted in configuration files: ordinary hertz,
// megahertz of omega / 2 pi, and angular rad/s.
enum class FrequencyUnit { hz, mhz_2pi, rads };

inline std::optional<FrequencyUnit> frequency_unit_from_suffix(std::string_view s) noexcept {
  if (s == "hz") return FrequencyUnit::hz;
  if (s == "mhz_2pi") return FrequencyUnit::mhz_2pi;
  if (s == "rads") return FrequencyUnit::rads;
  return std::nullopt;
}

constexpr double to_angular(double value, FrequencyUnit unit) noexcept {
  switch (unit) {
    case FrequencyUnit::hz: return hz_to_rad(value);
    case FrequencyUnit::mhz_2pi: return mhz_2pi(value);
    case FrequencyUnit::rads: return value;
  }
  return value;
}

// Energy decay rate (rad/s) of a level with lifetime t1 seconds.
constexpr double rate_from_lifetime(double t1_seconds) noexcept { return 1.0 / t1_seconds; }

}  // namespace eitlab::units
