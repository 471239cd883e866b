#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ioncool/errors.hpp"
#include "ioncool/potential.hpp"
#include "ioncool/units.hpp"

namespace ioncool {

/// Ion labels are integer offsets from the chain center: for odd N,
/// -(N-1)/2 ... (N-1)/2; for even N, -N/2 ... -1, 1 ... N/2 (no 0).
int label_from_index(int index, int n_ions);
int index_from_label(int label, int n_ions);

/// The `count` ions closest to the chain center, ordered by |label| with
/// ties resolved toward the negative side. Returned as sorted indices.
std::vector<int> centered_indices(int n_ions, int count);

/// An equilibrium ion chain with species roles.
///
/// Endcaps are the outermost ions; coolants and qubits partition the rest.
struct IonChain {
  TrapPotential potential;
  Eigen::VectorXd positions;  // normalized, strictly increasing
  std::vector<int> coolants;  // sorted indices
  std::vector<int> qubits;
  std::vector<int> endcaps;

  int size() const { return static_cast<int>(positions.size()); }
};

struct EquilibriumOptions {
  double tolerance = 1e-10;  // max-norm of the gradient
  int max_iterations = 200;
};

/// Damped Newton solve for the ordered equilibrium of `n_ions` ions.
/// Throws ConvergenceError (carrying the last residual) on failure.
Eigen::VectorXd solve_equilibrium(
    const TrapPotential& pot, int n_ions,
    const std::optional<Eigen::VectorXd>& initial_guess = std::nullopt,
    const EquilibriumOptions& opt = {});

/// Initial guess: equally spaced points over the estimated chain extent.
Eigen::VectorXd initial_chain_guess(const TrapPotential& pot, int n_ions);

/// Builds and validates a chain with the given coolant indices; endcaps are
/// the `n_endcaps` outermost ions split evenly between the two ends.
IonChain make_chain(const TrapPotential& pot, Eigen::VectorXd positions,
                    std::vector<int> coolants, int n_endcaps = 0);

/// Solves the equilibrium and places `n_coolants` centered coolants.
IonChain centered_chain(const TrapPotential& pot, int n_ions, int n_coolants,
                        int n_endcaps = 0);

/// Checks the role partition, ordering, and equilibrium residual.
void validate_chain(const IonChain& chain, double tolerance = 1e-8);

/// Nearest-neighbor spacings (normalized).
Eigen::VectorXd spacings(const Eigen::VectorXd& positions);

struct EquispacingOptions {
  /// Hold x4 at this value and fit x2 only.
  std::optional<double> fixed_x4;
  /// Exclude the two outermost spacings (endcap ions) from the fit.
  bool inner_only = true;
  int max_iterations = 4000;
};

struct EquispacingFit {
  TrapPotential potential;
  Eigen::VectorXd positions;
  double mean_spacing = 0.0;      // m, over the fitted spacings
  double spacing_variance = 0.0;  // m^2, over the fitted spacings
  double relative_spread = 0.0;   // std / mean of the fitted spacings
};

/// Thrown when the simplex search exhausts its budget.
class CalibrationError : public ConvergenceError {
 public:
  CalibrationError(const std::string& what, double residual, EquispacingFit best)
      : ConvergenceError(what, residual), best_(std::move(best)) {}
  const EquispacingFit& best() const noexcept { return best_; }

 private:
  EquispacingFit best_;
};

/// Fits (x2, x4) so that `n_ions` ions sit approximately equally spaced at
/// `target_spacing_m`. Minimizes the spacing variance plus a penalty on the
/// mean spacing's deviation from the target.
EquispacingFit calibrate_equispacing(int n_ions, double target_spacing_m,
                                     const Normalization& norm,
                                     const EquispacingOptions& opt = {});

/// Evaluates the fit statistics of an already-solved chain.
EquispacingFit describe_spacing(const TrapPotential& pot,
                                const Eigen::VectorXd& positions,
                                const Normalization& norm, bool inner_only);

}  // namespace ioncool
