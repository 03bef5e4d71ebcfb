#pragma once

#include <numbers>

namespace optomech {

/// CODATA 2018 exact/recommended values. Every formula in the library reads
/// from here.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;  // J s
  static constexpr double k_B = 1.380649e-23;      // J / K
  static constexpr double c = 299792458.0;         // m / s
};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Internal frequencies are angular (rad/s); I/O is in Hz.
constexpr double hz_to_rad(double hz) noexcept { return two_pi * hz; }
constexpr double rad_to_hz(double rad_per_s) noexcept { return rad_per_s / two_pi; }

}  // namespace optomech
