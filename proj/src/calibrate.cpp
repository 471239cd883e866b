#include <cmath>
#include <limits>

#include "ioncool/chain.hpp"
#include "ioncool/nelder_mead.hpp"

namespace ioncool {

namespace {

Eigen::VectorXd fitted_spacings(const Eigen::VectorXd& positions, bool inner_only) {
  Eigen::VectorXd s = spacings(positions);
  if (inner_only && s.size() > 2) return s.segment(1, s.size() - 2);
  return s;
}

// Mean spacing of the pure-power chain with unit coefficient; used to seed
// the fit through the exact length-scaling laws.
double unit_chain_spacing(const TrapPotential& pot, int n_ions, bool inner_only) {
  return fitted_spacings(solve_equilibrium(pot, n_ions), inner_only).mean();
}

}  // namespace

EquispacingFit describe_spacing(const TrapPotential& pot, const Eigen::VectorXd& positions,
                                const Normalization& norm, bool inner_only) {
  EquispacingFit fit;
  fit.potential = pot;
  fit.positions = positions;
  const Eigen::VectorXd s = fitted_spacings(positions, inner_only) * norm.d0;
  fit.mean_spacing = s.mean();
  fit.spacing_variance = (s.array() - fit.mean_spacing).square().mean();
  fit.relative_spread = std::sqrt(fit.spacing_variance) / fit.mean_spacing;
  return fit;
}

EquispacingFit calibrate_equispacing(int n_ions, double target_spacing_m,
                                     const Normalization& norm,
                                     const EquispacingOptions& opt) {
  if (n_ions < 3) throw DomainError("calibrate_equispacing: need at least 3 ions");
  if (!(target_spacing_m > 0.0)) {
    throw DomainError("calibrate_equispacing: target spacing must be positive");
  }
  const bool inner = opt.inner_only && n_ions >= 5;
  const double target = target_spacing_m / norm.d0;
  constexpr double kFail = 1e30;

  // Positions scale as x2^(-1/3) for a pure quadratic and x4^(-1/5) for a
  // pure quartic trap.
  const bool fit_x4 = !opt.fixed_x4.has_value();
  TrapPotential seed;
  if (fit_x4) {
    const double s1 = unit_chain_spacing({0.0, 1.0}, n_ions, inner);
    seed = {0.0, std::pow(s1 / target, 5.0)};
  } else if (*opt.fixed_x4 == 0.0) {
    const double s1 = unit_chain_spacing({1.0, 0.0}, n_ions, inner);
    seed = {std::pow(s1 / target, 3.0), 0.0};
  } else {
    seed = {0.0, *opt.fixed_x4};
    if (!(seed.x4 > 0.0)) throw DomainError("calibrate_equispacing: fixed x4 must be >= 0");
  }
  // Parameters are x2 in units of the seed scale and log(x4).
  const double x2_scale = seed.x4 > 0.0 ? std::pow(seed.x4, 3.0 / 5.0) : seed.x2;

  auto to_potential = [&](const Eigen::VectorXd& p) {
    TrapPotential pot;
    if (fit_x4) {
      pot.x2 = p(0) * x2_scale;
      pot.x4 = std::exp(p(1));
    } else {
      pot.x2 = p(0) * x2_scale;
      pot.x4 = *opt.fixed_x4;
    }
    return pot;
  };

  auto objective = [&](const Eigen::VectorXd& p) {
    const TrapPotential pot = to_potential(p);
    if (!pot.confining()) return kFail;
    try {
      const Eigen::VectorXd u = solve_equilibrium(pot, n_ions);
      const Eigen::VectorXd s = fitted_spacings(u, inner) / target;
      const double mean = s.mean();
      const double n = static_cast<double>(s.size());
      return (s.array() - mean).square().sum() + n * (mean - 1.0) * (mean - 1.0);
    } catch (const Error&) {
      return kFail;
    }
  };

  Eigen::VectorXd p0(fit_x4 ? 2 : 1);
  if (fit_x4) {
    p0 << 0.0, std::log(seed.x4);
  } else {
    p0 << seed.x2 / x2_scale;
  }
  SimplexOptions sopt;
  sopt.initial_step = 0.2;
  sopt.max_iterations = opt.max_iterations;
  sopt.f_tolerance = 1e-14;
  sopt.x_tolerance = 1e-9;
  const SimplexResult res = nelder_mead(objective, p0, sopt);

  const TrapPotential best = to_potential(res.x);
  if (res.f >= kFail) {
    throw CalibrationError("calibrate_equispacing: no confining candidate found", res.f,
                           EquispacingFit{best, {}, 0.0, 0.0, 0.0});
  }
  EquispacingFit fit = describe_spacing(best, solve_equilibrium(best, n_ions), norm, inner);
  if (!res.converged) {
    throw CalibrationError("calibrate_equispacing: simplex did not converge", res.f, fit);
  }
  return fit;
}

}  // namespace ioncool
