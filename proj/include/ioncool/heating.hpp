#pragma once

namespace ioncool {

/// How the normalization factor D depends on the chain.
enum class HeatingScaling {
  fixed,    // D is used as given for every chain
  per_ion,  // D is per ion: the chain's COM heating uses N * D
};

/// COM heating power law h = D w0 (A0 w0^(-2-alpha) + B0), in quanta/s
/// with w0 in rad/s.
struct HeatingModel {
  double alpha = 0.8;
  double A0 = 8.2e17;  // 1/s * (rad/s)^(2+alpha)
  double B0 = 0.9;     // 1/s
  double D = 1.0;
  HeatingScaling scaling = HeatingScaling::per_ion;

  /// D for a chain of `n_ions` ions.
  double effective_D(int n_ions) const {
    return scaling == HeatingScaling::per_ion ? D * n_ions : D;
  }
};

void validate(const HeatingModel& model);

/// h = D w0 (A0 w0^(-2-alpha) + B0). Throws DomainError for w0 <= 0.
double heating_rate(const HeatingModel& model, double omega0);

/// Heating rate of the COM mode of an `n_ions` chain (applies the scaling).
double com_heating_rate(const HeatingModel& model, double omega0, int n_ions);

/// w0 above which the B0 term makes h increase with frequency.
double heating_turnover_frequency(const HeatingModel& model);

}  // namespace ioncool
