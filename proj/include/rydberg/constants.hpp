// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

namespace rydberg {

// CODATA 2018, SI.
namespace constants {
inline constexpr double kHbar = 1.054571817e-34;             // J s
inline constexpr double kBoltzmann = 1.380649e-23;           // J / K
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F / m
inline constexpr double kSpeedOfLight = 299792458.0;         // m / s
inline constexpr double kElementaryCharge = 1.602176634e-19; // C
inline constexpr double kBohrRadius = 5.29177210903e-11;     // m
inline constexpr double kEA0 = kElementaryCharge * kBohrRadius;  // C m
}  // namespace constants

// Internal convention: time in microseconds, angular frequencies in rad/us.
namespace units {
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ordinary frequency in MHz -> angular frequency in rad/us.
constexpr double from_mhz(double f_mhz) { return kTwoPi * f_mhz; }
constexpr double from_khz(double f_khz) { return kTwoPi * f_khz * 1e-3; }
constexpr double from_ghz(double f_ghz) { return kTwoPi * f_ghz * 1e3; }
constexpr double from_hz(double f_hz) { return kTwoPi * f_hz * 1e-6; }

/// rad/us -> MHz.
constexpr double to_mhz(double omega) { return omega / kTwoPi; }

/// rad/us -> rad/s.
constexpr double to_rad_per_s(double omega) { return omega * 1e6; }
constexpr double from_rad_per_s(double omega_si) { return omega_si * 1e-6; }

/// Dipole moment in units of e*a0 -> C m.
constexpr double dipole_si(double dipole_ea0) { return dipole_ea0 * constants::kEA0; }

/// dBm -> W.
inline double dbm_to_watt(double p_dbm) { return 1e-3 * std::pow(10.0, p_dbm / 10.0); }
}  // namespace units

}  // namespace rydberg
