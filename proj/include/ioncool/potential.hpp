#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ioncool/errors.hpp"

namespace ioncool {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Dimensionless axial trap: V_trap(u) = x2 u^2 + x4 u^4 per ion.
template <typename Scalar>
struct BasicTrapPotential {
  Scalar x2{0};
  Scalar x4{0};

  /// Confining overall: the quartic term dominates far out, or the
  /// quadratic term confines on its own.
  bool confining() const {
    return x4 > Scalar(0) || (x4 == Scalar(0) && x2 > Scalar(0));
  }

  template <typename Other>
  BasicTrapPotential<Other> cast() const {
    return {Other(x2), Other(x4)};
  }
};

using TrapPotential = BasicTrapPotential<double>;

inline void require_confining(const TrapPotential& pot) {
  if (!pot.confining()) {
    throw DomainError("trap potential is not confining (x2=" +
                      std::to_string(pot.x2) +
                      ", x4=" + std::to_string(pot.x4) + ")");
  }
}

namespace detail {
template <typename Scalar>
Scalar checked_separation(Scalar ui, Scalar uj) {
  const Scalar d = ui - uj;
  using std::abs;
  if (abs(d) == Scalar(0)) {
    throw SingularityError("coincident ion positions");
  }
  return d;
}
}  // namespace detail

/// Sum_i (x2 u_i^2 + x4 u_i^4) + 1/2 Sum_{i != j} 1/|u_i - u_j|.
template <typename Scalar, typename Derived>
Scalar potential_energy(const BasicTrapPotential<Scalar>& pot,
                        const Eigen::MatrixBase<Derived>& u) {
  using std::abs;
  const Eigen::Index n = u.size();
  Scalar e(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar ui = u(i);
    const Scalar ui2 = ui * ui;
    e += pot.x2 * ui2 + pot.x4 * ui2 * ui2;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      e += Scalar(1) / abs(detail::checked_separation<Scalar>(ui, u(j)));
    }
  }
  return e;
}

template <typename Scalar, typename Derived>
VectorX<Scalar> gradient(const BasicTrapPotential<Scalar>& pot,
                         const Eigen::MatrixBase<Derived>& u) {
  using std::abs;
  const Eigen::Index n = u.size();
  VectorX<Scalar> g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar ui = u(i);
    g(i) = Scalar(2) * pot.x2 * ui + Scalar(4) * pot.x4 * ui * ui * ui;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar d = detail::checked_separation<Scalar>(u(i), u(j));
      // d/du_i of 1/|d| = -sign(d)/d^2
      const Scalar f = (d > Scalar(0) ? Scalar(1) : Scalar(-1)) / (d * d);
      g(i) -= f;
      g(j) += f;
    }
  }
  return g;
}

/// Analytic Hessian; symmetric by construction.
template <typename Scalar, typename Derived>
MatrixX<Scalar> hessian(const BasicTrapPotential<Scalar>& pot,
                        const Eigen::MatrixBase<Derived>& u) {
  using std::abs;
  const Eigen::Index n = u.size();
  MatrixX<Scalar> h = MatrixX<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar d = abs(detail::checked_separation<Scalar>(u(i), u(j)));
      const Scalar c = Scalar(2) / (d * d * d);
      h(i, j) = -c;
      h(j, i) = -c;
      h(i, i) += c;
      h(j, j) += c;
    }
    const Scalar ui = u(i);
    h(i, i) += Scalar(2) * pot.x2 + Scalar(12) * pot.x4 * ui * ui;
  }
  return h;
}

}  // namespace ioncool
