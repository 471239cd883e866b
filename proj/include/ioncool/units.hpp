#pragma once

#include <numbers>

namespace ioncool {

/// CODATA 2018 values.
namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;   // kg
/// e^2 / (4 pi eps0), J m.
inline constexpr double coulomb_constant_e2 =
    elementary_charge * elementary_charge /
    (4.0 * std::numbers::pi * vacuum_permittivity);
}  // namespace constants

/// Angular frequency that defines one normalized frequency unit (2 pi x 1 MHz).
inline constexpr double kOmegaUnit = 2.0 * std::numbers::pi * 1.0e6;

/// Default ion mass in atomic mass units (171Yb+).
inline constexpr double kDefaultMassU = 171.0;

/// Length/energy/frequency scales that make the axial potential
/// dimensionless. Positions are u = x / d0, energies V = U / E0, and
/// frequencies are measured in units of omega_unit.
struct Normalization {
  double mass = 0.0;        // kg
  double d0 = 0.0;          // m
  double E0 = 0.0;          // J
  double omega_unit = kOmegaUnit;  // rad/s

  double to_meters(double u) const { return u * d0; }
  double to_normalized_length(double x) const { return x / d0; }
};

/// Normalization for an ion of the given mass (kg).
/// d0^3 m omega_unit^2 = e^2/(4 pi eps0), E0 = e^2/(4 pi eps0 d0).
Normalization normalization_for(double mass_kg);

/// Convenience overload taking the mass in atomic mass units.
Normalization normalization_for_mass_u(double mass_u);

/// Normalized rate (units of omega_unit) to 1/s.
constexpr double rate_to_si(double gamma_normalized) {
  return gamma_normalized * kOmegaUnit;
}

constexpr double rate_to_normalized(double rate_per_s) {
  return rate_per_s / kOmegaUnit;
}

/// Seconds to normalized time (1 unit = 1/omega_unit).
constexpr double time_to_normalized(double t_seconds) {
  return t_seconds * kOmegaUnit;
}

constexpr double time_to_si(double t_normalized) {
  return t_normalized / kOmegaUnit;
}

}  // namespace ioncool
