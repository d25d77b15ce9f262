#pragma once

#include <numbers>

// CODATA 2018 values, SI units.
namespace levnano::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double k_B = 1.380649e-23;            // J/K
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double e_charge = 1.602176634e-19;    // C
inline constexpr double G = 6.67430e-11;               // m^3 kg^-1 s^-2
inline constexpr double amu = 1.66053906660e-27;       // kg
// Reference nucleon mass of the collapse models.
inline constexpr double m0 = amu;

inline constexpr double pa_per_mbar = 100.0;

inline constexpr double mbar_to_pa(double p_mbar) { return p_mbar * pa_per_mbar; }
inline constexpr double pa_to_mbar(double p_pa) { return p_pa / pa_per_mbar; }

}  // namespace levnano::constants
