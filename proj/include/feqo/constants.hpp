#pragma once

#include <numbers>

namespace feqo::constants {

// CODATA 2018.
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double electron_mass = 9.1093837015e-31;      // kg
inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double speed_of_light = 299792458.0;          // m/s

inline constexpr double electron_rest_energy = electron_mass * speed_of_light * speed_of_light;  // J
inline constexpr double joules_per_ev = elementary_charge;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace feqo::constants
