#include "ioncool/damping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

namespace ioncool {

namespace {

using cd = std::complex<double>;

void validate(const DampingConfig& damping, Eigen::Index n) {
  if (!(damping.gamma >= 0.0) || !std::isfinite(damping.gamma)) {
    throw DomainError("damping: gamma must be finite and >= 0");
  }
  for (int c : damping.coolants) {
    if (c < 0 || c >= n) throw DomainError("damping: coolant index out of range");
  }
}

Eigen::VectorXd projector_diagonal(const DampingConfig& damping, Eigen::Index n) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  for (int c : damping.coolants) p(c) = 1.0;
  return p;
}

// Newton / inverse-iteration polish of (z^2 I + gamma z P - K) w = 0.
// The pencil is complex symmetric, so w^T (not w^H) is its left eigenvector.
void refine(const Eigen::MatrixXd& k, const Eigen::VectorXd& p, double gamma, cd& z,
            Eigen::VectorXcd& w) {
  const Eigen::Index n = k.rows();
  const Eigen::MatrixXcd kc = k.cast<cd>();
  const Eigen::VectorXcd pc = p.cast<cd>();
  for (int it = 0; it < 3; ++it) {
    Eigen::MatrixXcd q = -kc;
    q.diagonal().array() += z * z + gamma * z * pc.array();
    Eigen::MatrixXcd dq = Eigen::MatrixXcd::Zero(n, n);
    dq.diagonal().array() = 2.0 * z + gamma * pc.array();

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(q);
    Eigen::VectorXcd next = lu.solve(dq * w);
    if (next.allFinite() && next.norm() > 0.0) {
      w = next / next.norm();
    }
    const cd num = w.transpose() * q * w;
    const cd den = w.transpose() * dq * w;
    if (std::abs(den) == 0.0) break;
    const cd step = num / den;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    z -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
  }
}

}  // namespace

DampedSpectrum exact_damped_modes(const Eigen::MatrixXd& kmat, const DampingConfig& damping) {
  return exact_damped_modes(kmat, normal_modes(Eigen::MatrixXd(-kmat)), damping);
}

DampedSpectrum exact_damped_modes(const Eigen::MatrixXd& kmat, const ModeSpectrum& undamped,
                                  const DampingConfig& damping) {
  const Eigen::Index n = kmat.rows();
  if (kmat.cols() != n || undamped.size() != n) {
    throw DomainError("exact_damped_modes: dimension mismatch");
  }
  validate(damping, n);
  const Eigen::VectorXd p = projector_diagonal(damping, n);

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  companion.topRightCorner(n, n).setIdentity();
  companion.bottomLeftCorner(n, n) = kmat;
  companion.bottomRightCorner(n, n).diagonal() = -damping.gamma * p;

  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, true);
  if (es.info() != Eigen::Success) throw NumericError("exact_damped_modes: eigensolver failed");

  DampedSpectrum out;
  out.eigenvalues = es.eigenvalues();
  const Eigen::MatrixXcd vecs = es.eigenvectors();

  // Upper-half-plane branch; overdamped pairs contribute their slower root.
  const double tiny = 1e-14 * std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> upper;
  std::vector<Eigen::Index> real_roots;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const double im = out.eigenvalues(i).imag();
    if (im > tiny) {
      upper.push_back(i);
    } else if (std::abs(im) <= tiny) {
      real_roots.push_back(i);
    }
  }
  std::sort(real_roots.begin(), real_roots.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(out.eigenvalues(a).real()) < std::abs(out.eigenvalues(b).real());
  });
  for (std::size_t i = 0; static_cast<Eigen::Index>(upper.size()) < n && i < real_roots.size(); ++i) {
    upper.push_back(real_roots[i]);
  }
  if (static_cast<Eigen::Index>(upper.size()) != n) {
    throw NumericError("exact_damped_modes: could not isolate " + std::to_string(n) +
                       " damped modes");
  }

  std::vector<cd> zs(static_cast<std::size_t>(n));
  Eigen::MatrixXcd ws(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index col = upper[static_cast<std::size_t>(c)];
    Eigen::VectorXcd w = vecs.col(col).head(n);
    w /= w.norm();
    zs[static_cast<std::size_t>(c)] = out.eigenvalues(col);
    ws.col(c) = w;
  }

  // Greedy assignment by overlap, ties broken by frequency proximity.
  const Eigen::MatrixXd overlap = (undamped.modes.transpose().cast<cd>() * ws).cwiseAbs();
  std::vector<std::tuple<double, double, Eigen::Index, Eigen::Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double df = std::abs(zs[static_cast<std::size_t>(c)].imag() - undamped.frequencies(j));
      pairs.emplace_back(-overlap(j, c), df, j, c);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<Eigen::Index> match(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const auto& [neg_ov, df, j, c] : pairs) {
    if (match[static_cast<std::size_t>(j)] >= 0 || used[static_cast<std::size_t>(c)]) continue;
    match[static_cast<std::size_t>(j)] = c;
    used[static_cast<std::size_t>(c)] = true;
  }

  out.mode_eigenvalues.resize(n);
  out.damped_modes.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index c = match[static_cast<std::size_t>(j)];
    cd z = zs[static_cast<std::size_t>(c)];
    Eigen::VectorXcd w = ws.col(c);
    if (damping.gamma > 0.0) {
      refine(kmat, p, damping.gamma, z, w);
    } else {
      z = cd(0.0, undamped.frequencies(j));
    }
    const cd phase = undamped.modes.col(j).cast<cd>().dot(w);  // conj(v)^T w, v real
    if (std::abs(phase) > 0.0) w *= std::conj(phase) / std::abs(phase);
    out.mode_eigenvalues(j) = z;
    out.damped_modes.col(j) = w;
  }
  return out;
}

double perturbative_rate(const ModeSpectrum& spectrum, const DampingConfig& damping, int mode) {
  validate(damping, spectrum.size());
  const double s = participation_sum(spectrum, mode, damping.coolants);
  const double w = spectrum.frequencies(mode);
  const double w2 = w * w;
  const double x = damping.gamma * damping.gamma * w2 * s * s;
  // sqrt(w^4 + x) - w^2 without cancellation.
  const double diff = x / (std::sqrt(w2 * w2 + x) + w2);
  return std::sqrt(0.5 * diff);
}

double linearized_rate(const ModeSpectrum& spectrum, const DampingConfig& damping, int mode) {
  validate(damping, spectrum.size());
  return 0.5 * damping.gamma * participation_sum(spectrum, mode, damping.coolants);
}

Eigen::VectorXcd first_order_mode_correction(const ModeSpectrum& spectrum,
                                             const DampingConfig& damping, int mode) {
  validate(damping, spectrum.size());
  const int n = spectrum.size();
  if (mode < 0 || mode >= n) throw DomainError("first_order_mode_correction: bad mode index");
  const double wi = spectrum.frequencies(mode);
  const Eigen::VectorXd p = projector_diagonal(damping, n);
  const Eigen::VectorXd pv = p.cwiseProduct(spectrum.modes.col(mode));

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (k == mode) continue;
    const double wk = spectrum.frequencies(k);
    if (std::abs(wi - wk) < 1e-8) {
      throw DegeneracyError("first_order_mode_correction: modes " + std::to_string(mode) +
                            " and " + std::to_string(k) + " are degenerate");
    }
    const double coupling = spectrum.modes.col(k).dot(pv);
    const cd coeff = cd(0.0, wi) * coupling / (wi * wi - wk * wk);
    out += coeff * spectrum.modes.col(k).cast<cd>();
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw DomainError("log_grid: bad range");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    g[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  return g;
}

std::vector<PerturbationErrorRow> perturbation_error_scan(const IonChain& chain,
                                                          std::span<const double> gammas) {
  const Eigen::MatrixXd h = hessian(chain.potential, chain.positions);
  const ModeSpectrum spectrum = normal_modes(h);
  const Eigen::MatrixXd kmat = -h;
  const int com = com_mode_index(spectrum);
  std::vector<PerturbationErrorRow> rows;
  rows.reserve(gammas.size());
  for (double g : gammas) {
    if (!(g >= 0.0)) throw DomainError("perturbation_error_scan: gamma must be >= 0");
    const DampingConfig d{g, chain.coolants};
    PerturbationErrorRow r;
    r.gamma = g;
    r.exact_rate = exact_damped_modes(kmat, spectrum, d).cooling_rate(com);
    r.perturbative_rate = perturbative_rate(spectrum, d, com);
    r.linearized_rate = linearized_rate(spectrum, d, com);
    r.relative_error =
        r.exact_rate == 0.0 ? std::abs(r.perturbative_rate)
                            : std::abs(r.perturbative_rate - r.exact_rate) / r.exact_rate;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ioncool
