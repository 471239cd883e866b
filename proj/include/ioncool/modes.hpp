#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ioncool/chain.hpp"

namespace ioncool {

/// Undamped axial normal modes.
///
/// `frequencies(i)` is omega_i in normalized units (ascending) and column i
/// of `modes` is the unit participation vector v_i, so `modes(k, i)` is the
/// participation factor of ion k in mode i. The dynamical matrix is
/// K = -hessian with K v_i = -omega_i^2 v_i.
struct ModeSpectrum {
  Eigen::VectorXd frequencies;
  Eigen::MatrixXd modes;

  int size() const { return static_cast<int>(frequencies.size()); }
  Eigen::MatrixXd dynamical_matrix() const;
};

/// Diagonalizes a symmetric positive-definite Hessian. Eigenvectors are
/// signed so that Sum_k v_ik >= 0 (first significant entry positive when the
/// sum vanishes); degenerate subspaces get a canonical basis.
ModeSpectrum normal_modes(const Eigen::MatrixXd& hessian);

inline ModeSpectrum normal_modes(const IonChain& chain) {
  return normal_modes(hessian(chain.potential, chain.positions));
}

/// Index of the center-of-mass mode: the lowest-frequency mode, whose
/// entries must all share one sign. Throws DegeneracyError otherwise.
int com_mode_index(const ModeSpectrum& spectrum);

/// Sum_{k in ions} |v_ik|^2.
double participation_sum(const ModeSpectrum& spectrum, int mode, std::span<const int> ions);

}  // namespace ioncool
