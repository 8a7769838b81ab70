#pragma once

// CODATA 2018 values unless noted. Everything internal is SI.
namespace wgsim::constants {

inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C, also J per eV
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double neutron_mass = 1.67492749804e-27;      // kg
inline constexpr double electron_mass = 9.1093837015e-31;      // kg
inline constexpr double muon_mass = 1.883531627e-28;           // kg
inline constexpr double hydrogen_mass_u = 1.00782503207;       // u, atomic 1H
inline constexpr double standard_gravity = 9.80665;            // m/s^2, conventional value
inline constexpr double pi = 3.141592653589793238462643383279502884;

inline constexpr double eV = elementary_charge;

}  // namespace wgsim::constants
