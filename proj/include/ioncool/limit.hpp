#pragma once

#include <string_view>

#include "ioncool/damping.hpp"
#include "ioncool/heating.hpp"

namespace ioncool {

enum class CoolingMethod { exact, perturbative, linearized, quadratic_bound };

std::string_view to_string(CoolingMethod m);
CoolingMethod cooling_method_from_string(std::string_view s);

/// Steady state of dn/dt = h - c n: n0 = h / c.
struct CoolingLimitReport {
  double n0 = 0.0;      // quanta
  double h = 0.0;       // quanta/s
  double c = 0.0;       // 1/s
  CoolingMethod method = CoolingMethod::exact;
  double omega0 = 0.0;         // COM frequency, rad/s
  double participation = 0.0;  // coolant participation sum of the COM mode
};

/// COM-mode cooling rate in 1/s for a chain with uniform damping `gamma`
/// (normalized) on its coolants.
double com_cooling_rate(const IonChain& chain, double gamma, CoolingMethod method);

/// n0 = h / c for the chain's COM mode. h is taken at the COM frequency in
/// SI units; c from the selected damping method, converted to SI.
/// Throws NoCoolingError when c == 0.
CoolingLimitReport cooling_limit(const IonChain& chain, const HeatingModel& heating,
                                 double gamma, CoolingMethod method = CoolingMethod::exact);

/// Same, with a precomputed spectrum (avoids re-diagonalizing).
CoolingLimitReport cooling_limit(const IonChain& chain, const ModeSpectrum& spectrum,
                                 const HeatingModel& heating, double gamma,
                                 CoolingMethod method = CoolingMethod::exact);

/// Analytic bound from the pure quadratic chain: w0 = sqrt(2 x2) omega_unit
/// and participation N_C / N.
CoolingLimitReport quadratic_upper_bound(int n_ions, int n_coolants, double x2, double gamma,
                                         const HeatingModel& heating);

/// D that makes `cooling_limit` reproduce `observed_n0` on the reference
/// chain. Under per-ion scaling the returned D is per ion.
double calibrate_D(const HeatingModel& model, const IonChain& reference, double gamma,
                   double observed_n0, CoolingMethod method = CoolingMethod::exact);

}  // namespace ioncool
