#include "ioncool/limit.hpp"

#include <cmath>
#include <string>

#include "ioncool/units.hpp"

namespace ioncool {

std::string_view to_string(CoolingMethod m) {
  switch (m) {
    case CoolingMethod::exact: return "exact-eigen";
    case CoolingMethod::perturbative: return "perturbative";
    case CoolingMethod::linearized: return "linearized";
    case CoolingMethod::quadratic_bound: return "quadratic-bound";
  }
  return "unknown";
}

CoolingMethod cooling_method_from_string(std::string_view s) {
  if (s == "exact-eigen" || s == "exact") return CoolingMethod::exact;
  if (s == "perturbative") return CoolingMethod::perturbative;
  if (s == "linearized") return CoolingMethod::linearized;
  if (s == "quadratic-bound") return CoolingMethod::quadratic_bound;
  throw DomainError("unknown cooling method '" + std::string(s) + "'");
}

namespace {

double normalized_rate(const IonChain& chain, const ModeSpectrum& spectrum, int com,
                       double gamma, CoolingMethod method) {
  const DampingConfig d{gamma, chain.coolants};
  switch (method) {
    case CoolingMethod::exact: {
      const Eigen::MatrixXd k = -hessian(chain.potential, chain.positions);
      return exact_damped_modes(k, spectrum, d).cooling_rate(com);
    }
    case CoolingMethod::perturbative: return perturbative_rate(spectrum, d, com);
    case CoolingMethod::linearized: return linearized_rate(spectrum, d, com);
    case CoolingMethod::quadratic_bound:
      throw DomainError("quadratic-bound is not a per-chain method; use quadratic_upper_bound");
  }
  return 0.0;
}

CoolingLimitReport finish(double h, double c, CoolingMethod method, double omega0, double s) {
  if (!(c > 0.0)) {
    throw NoCoolingError("cooling_limit: cooling rate is zero (no coolants or gamma = 0)");
  }
  return {h / c, h, c, method, omega0, s};
}

}  // namespace

double com_cooling_rate(const IonChain& chain, double gamma, CoolingMethod method) {
  const ModeSpectrum spectrum = normal_modes(chain);
  return rate_to_si(normalized_rate(chain, spectrum, com_mode_index(spectrum), gamma, method));
}

CoolingLimitReport cooling_limit(const IonChain& chain, const HeatingModel& heating,
                                 double gamma, CoolingMethod method) {
  return cooling_limit(chain, normal_modes(chain), heating, gamma, method);
}

CoolingLimitReport cooling_limit(const IonChain& chain, const ModeSpectrum& spectrum,
                                 const HeatingModel& heating, double gamma,
                                 CoolingMethod method) {
  if (!(gamma >= 0.0)) throw DomainError("cooling_limit: gamma must be >= 0");
  const int com = com_mode_index(spectrum);
  const double omega0 = rate_to_si(spectrum.frequencies(com));
  const double h = com_heating_rate(heating, omega0, chain.size());
  const double s = participation_sum(spectrum, com, chain.coolants);
  if (chain.coolants.empty() || gamma == 0.0) return finish(h, 0.0, method, omega0, s);
  const double c = rate_to_si(normalized_rate(chain, spectrum, com, gamma, method));
  return finish(h, c, method, omega0, s);
}

CoolingLimitReport quadratic_upper_bound(int n_ions, int n_coolants, double x2, double gamma,
                                         const HeatingModel& heating) {
  if (n_ions < 1 || n_coolants < 0 || n_coolants > n_ions) {
    throw DomainError("quadratic_upper_bound: need 0 <= N_C <= N");
  }
  if (!(x2 > 0.0)) throw DomainError("quadratic_upper_bound: x2 must be > 0");
  const double w = std::sqrt(2.0 * x2);
  const double s = static_cast<double>(n_coolants) / n_ions;
  const double w2 = w * w;
  const double x = gamma * gamma * w2 * s * s;
  const double c = rate_to_si(std::sqrt(0.5 * x / (std::sqrt(w2 * w2 + x) + w2)));
  const double omega0 = rate_to_si(w);
  return finish(com_heating_rate(heating, omega0, n_ions), c, CoolingMethod::quadratic_bound,
                omega0, s);
}

double calibrate_D(const HeatingModel& model, const IonChain& reference, double gamma,
                   double observed_n0, CoolingMethod method) {
  if (!(observed_n0 > 0.0)) throw DomainError("calibrate_D: observed n0 must be > 0");
  const CoolingLimitReport r = cooling_limit(reference, model, gamma, method);
  return model.D * observed_n0 / r.n0;
}

}  // namespace ioncool
