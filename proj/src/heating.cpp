#include "ioncool/heating.hpp"

#include <cmath>
#include <string>

#include "ioncool/errors.hpp"

namespace ioncool {

void validate(const HeatingModel& m) {
  if (!(m.alpha > 0.0)) throw DomainError("heating: alpha must be > 0");
  if (!(m.A0 >= 0.0) || !(m.B0 >= 0.0)) throw DomainError("heating: A0, B0 must be >= 0");
  if (!(m.D > 0.0)) throw DomainError("heating: D must be > 0");
}

double heating_rate(const HeatingModel& m, double omega0) {
  validate(m);
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    throw DomainError("heating_rate: omega0 must be positive, got " + std::to_string(omega0));
  }
  return m.D * omega0 * (m.A0 * std::pow(omega0, -2.0 - m.alpha) + m.B0);
}

double com_heating_rate(const HeatingModel& m, double omega0, int n_ions) {
  if (n_ions < 1) throw DomainError("com_heating_rate: n_ions must be >= 1");
  HeatingModel chain = m;
  chain.D = m.effective_D(n_ions);
  return heating_rate(chain, omega0);
}

double heating_turnover_frequency(const HeatingModel& m) {
  validate(m);
  if (m.B0 == 0.0) return INFINITY;
  // dh/dw = D (-(1 + alpha) A0 w^(-2-alpha) + B0) = 0
  return std::pow(m.A0 * (1.0 + m.alpha) / m.B0, 1.0 / (2.0 + m.alpha));
}

}  // namespace ioncool
