#pragma once

// CODATA 2018 values. k_b and h are exact by definition of the SI.
namespace odt::constants {

inline constexpr double speed_of_light   = 299792458.0;        // m/s
inline constexpr double planck           = 6.62607015e-34;     // J s
inline constexpr double hbar             = 1.054571817e-34;    // J s
inline constexpr double boltzmann        = 1.380649e-23;       // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double standard_gravity = 9.80665;            // m/s^2

inline constexpr double pi = 3.14159265358979323846;

// zeta(3), for the harmonic-trap condensation threshold N = zeta(3) (kT/hw)^3
inline constexpr double zeta3 = 1.2020569031595942854;

}  // namespace odt::constants
