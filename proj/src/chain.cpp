#include "ioncool/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ioncool {

int label_from_index(int index, int n_ions) {
  if (index < 0 || index >= n_ions) {
    throw DomainError("ion index " + std::to_string(index) + " out of range");
  }
  if (n_ions % 2 == 1) return index - (n_ions - 1) / 2;
  const int half = n_ions / 2;
  return index < half ? index - half : index - half + 1;
}

int index_from_label(int label, int n_ions) {
  int index = 0;
  if (n_ions % 2 == 1) {
    index = label + (n_ions - 1) / 2;
  } else {
    const int half = n_ions / 2;
    if (label == 0) throw DomainError("label 0 does not exist for even chains");
    index = label < 0 ? label + half : label + half - 1;
  }
  if (index < 0 || index >= n_ions) {
    throw DomainError("ion label " + std::to_string(label) + " out of range");
  }
  return index;
}

std::vector<int> centered_indices(int n_ions, int count) {
  if (count < 0 || count > n_ions) {
    throw DomainError("centered_indices: count out of range");
  }
  std::vector<int> idx(static_cast<std::size_t>(n_ions));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [n_ions](int a, int b) {
    const int la = label_from_index(a, n_ions);
    const int lb = label_from_index(b, n_ions);
    if (std::abs(la) != std::abs(lb)) return std::abs(la) < std::abs(lb);
    return la < lb;
  });
  idx.resize(static_cast<std::size_t>(count));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Eigen::VectorXd spacings(const Eigen::VectorXd& positions) {
  const Eigen::Index n = positions.size();
  if (n < 2) return Eigen::VectorXd(0);
  return positions.tail(n - 1) - positions.head(n - 1);
}

Eigen::VectorXd initial_chain_guess(const TrapPotential& pot, int n_ions) {
  if (n_ions == 1) return Eigen::VectorXd::Zero(1);
  // Outermost-ion force balance with a crude Coulomb estimate:
  // 2 x2 L + 4 x4 L^3 = N ln(N) / L^2, solved for the half-extent L.
  const double n = n_ions;
  const double push = std::max(1.0, n * std::log(n)) / 4.0;
  auto residual = [&](double L) {
    return 2.0 * pot.x2 * L + 4.0 * pot.x4 * L * L * L - push / (L * L);
  };
  double lo = 1e-6;
  double hi = 1.0;
  while (residual(hi) < 0.0 && hi < 1e12) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  const double L = 0.5 * (lo + hi);
  return Eigen::VectorXd::LinSpaced(n_ions, -L, L);
}

namespace {

bool strictly_increasing(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 1; i < u.size(); ++i) {
    if (!(u(i) > u(i - 1))) return false;
  }
  return true;
}

}  // namespace

Eigen::VectorXd solve_equilibrium(const TrapPotential& pot, int n_ions,
                                  const std::optional<Eigen::VectorXd>& initial_guess,
                                  const EquilibriumOptions& opt) {
  require_confining(pot);
  if (n_ions < 1) throw DomainError("solve_equilibrium: n_ions must be >= 1");

  Eigen::VectorXd u = initial_guess ? *initial_guess : initial_chain_guess(pot, n_ions);
  if (u.size() != n_ions) {
    throw DomainError("solve_equilibrium: initial guess has wrong size");
  }
  std::sort(u.begin(), u.end());
  if (!strictly_increasing(u)) {
    throw SingularityError("solve_equilibrium: initial guess has coincident ions");
  }

  double energy = potential_energy(pot, u);
  Eigen::VectorXd g = gradient(pot, u);
  double residual = g.cwiseAbs().maxCoeff();
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (residual < opt.tolerance) return u;

    const Eigen::MatrixXd h = hessian(pot, u);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    Eigen::VectorXd step;
    if (llt.info() == Eigen::Success) {
      step = -llt.solve(g);
    } else {
      step = -g;  // steepest descent away from non-convex regions
    }
    double slope = g.dot(step);
    if (slope >= 0.0) {
      step = -g;
      slope = -g.squaredNorm();
    }

    // Near the minimum energy differences drown in round-off, so a full
    // Newton step that halves the gradient is taken without a line search.
    bool accepted = false;
    if (llt.info() == Eigen::Success) {
      const Eigen::VectorXd trial = u + step;
      if (strictly_increasing(trial)) {
        const Eigen::VectorXd gt = gradient(pot, trial);
        if (gt.cwiseAbs().maxCoeff() < 0.5 * residual) {
          u = trial;
          energy = potential_energy(pot, u);
          g = gt;
          residual = g.cwiseAbs().maxCoeff();
          continue;
        }
      }
    }

    // Backtracking on the energy; steps must keep the ordering.
    double t = 1.0;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Eigen::VectorXd trial = u + t * step;
      if (!strictly_increasing(trial)) continue;
      const double e = potential_energy(pot, trial);
      if (e <= energy + 1e-4 * t * slope) {
        u = trial;
        energy = e;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Energy differences are below round-off: accept a pure Newton step if
      // it reduces the gradient.
      const Eigen::VectorXd trial = u + step;
      if (strictly_increasing(trial) &&
          gradient(pot, trial).cwiseAbs().maxCoeff() < residual) {
        u = trial;
        energy = potential_energy(pot, u);
      } else {
        break;
      }
    }
    g = gradient(pot, u);
    residual = g.cwiseAbs().maxCoeff();
  }
  if (residual < opt.tolerance) return u;
  throw ConvergenceError("solve_equilibrium: no convergence, residual " +
                             std::to_string(residual),
                         residual);
}

void validate_chain(const IonChain& chain, double tolerance) {
  const int n = chain.size();
  if (n < 1) throw DomainError("chain is empty");
  if (!strictly_increasing(chain.positions)) {
    throw DomainError("chain positions are not strictly increasing");
  }
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const auto* set : {&chain.coolants, &chain.qubits, &chain.endcaps}) {
    for (int i : *set) {
      if (i < 0 || i >= n) throw DomainError("role index out of range");
      if (seen[static_cast<std::size_t>(i)]++) {
        throw DomainError("role sets overlap at index " + std::to_string(i));
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw DomainError("role sets do not cover every ion");
  }
  const double r = gradient(chain.potential, chain.positions).cwiseAbs().maxCoeff();
  if (r > tolerance) {
    throw DomainError("chain is not at equilibrium, residual " + std::to_string(r));
  }
}

IonChain make_chain(const TrapPotential& pot, Eigen::VectorXd positions,
                    std::vector<int> coolants, int n_endcaps) {
  IonChain chain;
  chain.potential = pot;
  chain.positions = std::move(positions);
  const int n = chain.size();
  if (n_endcaps < 0 || n_endcaps > n) throw DomainError("bad endcap count");
  std::sort(coolants.begin(), coolants.end());
  coolants.erase(std::unique(coolants.begin(), coolants.end()), coolants.end());
  const int left = n_endcaps / 2 + n_endcaps % 2;
  const int right = n_endcaps / 2;
  for (int i = 0; i < left; ++i) chain.endcaps.push_back(i);
  for (int i = n - right; i < n; ++i) chain.endcaps.push_back(i);
  for (int c : coolants) {
    if (std::find(chain.endcaps.begin(), chain.endcaps.end(), c) != chain.endcaps.end()) {
      throw DomainError("coolant placed on an endcap position");
    }
  }
  chain.coolants = std::move(coolants);
  for (int i = 0; i < n; ++i) {
    const bool taken =
        std::binary_search(chain.coolants.begin(), chain.coolants.end(), i) ||
        std::find(chain.endcaps.begin(), chain.endcaps.end(), i) != chain.endcaps.end();
    if (!taken) chain.qubits.push_back(i);
  }
  validate_chain(chain);
  return chain;
}

IonChain centered_chain(const TrapPotential& pot, int n_ions, int n_coolants,
                        int n_endcaps) {
  if (n_coolants + n_endcaps > n_ions) {
    throw DomainError("centered_chain: more coolants and endcaps than ions");
  }
  Eigen::VectorXd u = solve_equilibrium(pot, n_ions);
  return make_chain(pot, std::move(u), centered_indices(n_ions, n_coolants), n_endcaps);
}

}  // namespace ioncool
