#include "ioncool/units.hpp"

#include <cmath>
#include <string>

#include "ioncool/errors.hpp"

namespace ioncool {

Normalization normalization_for(double mass_kg) {
  if (!(mass_kg > 0.0) || !std::isfinite(mass_kg)) {
    throw DomainError("normalization_for: mass must be positive, got " +
                      std::to_string(mass_kg));
  }
  Normalization n;
  n.mass = mass_kg;
  n.omega_unit = kOmegaUnit;
  n.d0 = std::cbrt(constants::coulomb_constant_e2 /
                   (mass_kg * kOmegaUnit * kOmegaUnit));
  n.E0 = constants::coulomb_constant_e2 / n.d0;
  return n;
}

Normalization normalization_for_mass_u(double mass_u) {
  return normalization_for(mass_u * constants::atomic_mass_unit);
}

}  // namespace ioncool
