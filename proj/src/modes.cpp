#include "ioncool/modes.hpp"

#include <cmath>
#include <string>

namespace ioncool {

namespace {

constexpr double kDegenerateRelGap = 1e-10;

void canonicalize_subspace(Eigen::MatrixXd& modes, Eigen::Index first, Eigen::Index count) {
  const Eigen::Index n = modes.rows();
  const Eigen::MatrixXd q = modes.middleCols(first, count);
  const Eigen::MatrixXd projector = q * q.transpose();
  Eigen::MatrixXd basis(n, count);
  Eigen::Index found = 0;
  for (Eigen::Index k = 0; k < n && found < count; ++k) {
    Eigen::VectorXd r = projector.col(k);
    for (Eigen::Index j = 0; j < found; ++j) r -= basis.col(j).dot(r) * basis.col(j);
    const double norm = r.norm();
    if (norm > 1e-6) basis.col(found++) = r / norm;
  }
  modes.middleCols(first, count) = basis;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double sum = v.sum();
  if (std::abs(sum) > 1e-10) {
    if (sum < 0.0) v = -v;
    return;
  }
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-8) {
      if (v(k) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

Eigen::MatrixXd ModeSpectrum::dynamical_matrix() const {
  return -(modes * frequencies.array().square().matrix().asDiagonal() * modes.transpose());
}

ModeSpectrum normal_modes(const Eigen::MatrixXd& hessian) {
  if (hessian.rows() != hessian.cols() || hessian.rows() == 0) {
    throw DomainError("normal_modes: hessian must be square and non-empty");
  }
  if (!hessian.isApprox(hessian.transpose(), 1e-12)) {
    throw DomainError("normal_modes: hessian is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian);
  if (es.info() != Eigen::Success) throw NumericError("normal_modes: eigensolver failed");
  const Eigen::VectorXd& lambda = es.eigenvalues();
  if (!(lambda(0) > 0.0)) {
    throw InstabilityError("normal_modes: hessian is not positive definite (min eigenvalue " +
                           std::to_string(lambda(0)) + ")");
  }

  ModeSpectrum s;
  s.frequencies = lambda.cwiseSqrt();
  s.modes = es.eigenvectors();

  const Eigen::Index n = lambda.size();
  const double scale = lambda.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i + 1;
    while (j < n && lambda(j) - lambda(j - 1) < kDegenerateRelGap * scale) ++j;
    if (j - i > 1) canonicalize_subspace(s.modes, i, j - i);
    i = j;
  }
  for (Eigen::Index i = 0; i < n; ++i) fix_sign(s.modes.col(i));
  return s;
}

int com_mode_index(const ModeSpectrum& spectrum) {
  if (spectrum.size() == 0) throw DomainError("com_mode_index: empty spectrum");
  Eigen::Index lowest = 0;
  spectrum.frequencies.minCoeff(&lowest);
  const Eigen::VectorXd v = spectrum.modes.col(lowest);
  const double floor = 1e-12;
  const bool all_pos = (v.array() > floor).all();
  const bool all_neg = (v.array() < -floor).all();
  if (!all_pos && !all_neg) {
    throw DegeneracyError("com_mode_index: lowest mode does not move all ions in phase");
  }
  return static_cast<int>(lowest);
}

double participation_sum(const ModeSpectrum& spectrum, int mode, std::span<const int> ions) {
  if (mode < 0 || mode >= spectrum.size()) {
    throw DomainError("participation_sum: mode index out of range");
  }
  double sum = 0.0;
  for (int k : ions) {
    if (k < 0 || k >= spectrum.size()) {
      throw DomainError("participation_sum: ion index out of range");
    }
    const double v = spectrum.modes(k, mode);
    sum += v * v;
  }
  return sum;
}

}  // namespace ioncool
