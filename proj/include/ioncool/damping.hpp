#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ioncool/modes.hpp"

namespace ioncool {

/// Uniform per-ion damping gamma on the coolant ions (Gamma = gamma P).
struct DampingConfig {
  double gamma = 0.0;          // normalized
  std::vector<int> coolants;   // ion indices
};

/// Spectrum of x'' = K x - gamma P x'.
///
/// `eigenvalues` holds all 2N eigenvalues of the first-order companion
/// system. `mode_eigenvalues(j)` and column j of `damped_modes` are the
/// damped counterpart of undamped mode j (Im z >= 0 branch), refined on the
/// quadratic eigenproblem; damped mode vectors have unit norm and are
/// phased so that v_j^T w_j is real and positive.
struct DampedSpectrum {
  Eigen::VectorXcd eigenvalues;
  Eigen::VectorXcd mode_eigenvalues;
  Eigen::MatrixXcd damped_modes;

  /// |Re z_j|: amplitude decay rate of mode j.
  double cooling_rate(int mode) const { return -mode_eigenvalues(mode).real(); }
};

/// Exact solve via the 2N x 2N companion matrix [[0, I], [K, -gamma P]].
DampedSpectrum exact_damped_modes(const Eigen::MatrixXd& dynamical_matrix,
                                  const DampingConfig& damping);

/// Same, reusing an already computed undamped spectrum for mode matching.
DampedSpectrum exact_damped_modes(const Eigen::MatrixXd& dynamical_matrix,
                                  const ModeSpectrum& undamped,
                                  const DampingConfig& damping);

/// First-order rate: (1/sqrt 2) sqrt(sqrt(w^4 + gamma^2 w^2 S^2) - w^2)
/// with S the coolant participation sum of `mode`.
double perturbative_rate(const ModeSpectrum& spectrum, const DampingConfig& damping, int mode);

/// (gamma / 2) S.
double linearized_rate(const ModeSpectrum& spectrum, const DampingConfig& damping, int mode);

/// Coefficient w^(1) of gamma in the damped mode vector:
/// Sum_{k != i} i w_i (v_k^T P v_i) / (w_i^2 - w_k^2) v_k.
Eigen::VectorXcd first_order_mode_correction(const ModeSpectrum& spectrum,
                                             const DampingConfig& damping, int mode);

struct PerturbationErrorRow {
  double gamma = 0.0;
  double exact_rate = 0.0;
  double perturbative_rate = 0.0;
  double linearized_rate = 0.0;
  double relative_error = 0.0;  // |perturbative - exact| / exact
};

/// COM-mode exact vs perturbative rates on a grid of gamma values.
std::vector<PerturbationErrorRow> perturbation_error_scan(const IonChain& chain,
                                                          std::span<const double> gammas);

/// Log-spaced grid of `count` values over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace ioncool
