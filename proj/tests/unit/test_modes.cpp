#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ioncool/modes.hpp"

using namespace ioncool;

namespace {

const TrapPotential kQuartic15{0.00188, 0.00177};

IonChain quartic15(std::vector<int> coolants = {}) {
  return make_chain(kQuartic15, solve_equilibrium(kQuartic15, 15), std::move(coolants));
}

IonChain quadratic(int n, double x2 = 0.02) {
  const TrapPotential pot{x2, 0.0};
  return make_chain(pot, solve_equilibrium(pot, n), {});
}

}  // namespace

TEST_CASE("single ion frequency") {
  for (double x2 : {1e-4, 0.25, 3.0}) {
    const ModeSpectrum s = normal_modes(quadratic(1, x2));
    REQUIRE(s.size() == 1);
    CHECK(s.frequencies(0) == doctest::Approx(std::sqrt(2.0 * x2)).epsilon(1e-14));
  }
}

TEST_CASE("spectrum invariants") {
  for (const IonChain& c : {quartic15(), quadratic(9), quadratic(20, 0.001)}) {
    const ModeSpectrum s = normal_modes(c);
    const int n = s.size();
    const Eigen::MatrixXd gram = s.modes.transpose() * s.modes;
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd k = s.dynamical_matrix();
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd r = k * s.modes.col(i) + s.frequencies(i) * s.frequencies(i) * s.modes.col(i);
      CHECK(r.cwiseAbs().maxCoeff() < 1e-8);
      CHECK(s.modes.col(i).sum() >= -1e-12);
      if (i > 0) CHECK(s.frequencies(i) >= s.frequencies(i - 1));
      // Reflection parity.
      const double parity = s.modes.col(i).dot(Eigen::VectorXd(s.modes.col(i).reverse()));
      CHECK(std::abs(std::abs(parity) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("harmonic chains have a uniform COM mode") {
  for (int n : {2, 5, 15, 31}) {
    const ModeSpectrum s = normal_modes(quadratic(n));
    CHECK(com_mode_index(s) == 0);
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(s.modes(k, 0) - 1.0 / std::sqrt(static_cast<double>(n))) < 1e-10);
    }
  }
}

TEST_CASE("quartic chain COM participation peaks at the center") {
  const ModeSpectrum s = normal_modes(quartic15());
  CHECK(com_mode_index(s) == 0);
  for (int k = 0; k < 15; ++k) CHECK(s.modes(k, 0) > 0.0);
  for (int k = 0; k < 7; ++k) {
    CHECK(s.modes(k + 1, 0) > s.modes(k, 0));  // rises toward the center
  }
  CHECK(s.modes(7, 0) > s.modes(0, 0));
}

TEST_CASE("COM selection does not depend on eigen output order") {
  const IonChain c = quartic15();
  const Eigen::MatrixXd h = hessian(c.potential, c.positions);
  // Relabeling ions permutes the Hessian but not the physics.
  Eigen::PermutationMatrix<Eigen::Dynamic> p(15);
  std::vector<int> perm(15);
  for (int i = 0; i < 15; ++i) perm[i] = (i * 4) % 15;
  for (int i = 0; i < 15; ++i) p.indices()(i) = perm[i];
  const Eigen::MatrixXd hp = p * h * p.transpose();
  const ModeSpectrum a = normal_modes(h);
  const ModeSpectrum b = normal_modes(hp);
  CHECK(com_mode_index(b) == com_mode_index(a));
  CHECK(b.frequencies(com_mode_index(b)) == doctest::Approx(a.frequencies(0)).epsilon(1e-12));
  const Eigen::VectorXd back = p.transpose() * b.modes.col(0);
  CHECK((back - a.modes.col(0)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("unstable hessians are rejected") {
  Eigen::MatrixXd h(2, 2);
  h << 1.0, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(normal_modes(h), InstabilityError);
}

TEST_CASE("COM sign check") {
  ModeSpectrum s;
  s.frequencies = Eigen::Vector2d(1.0, 2.0);
  s.modes = Eigen::Matrix2d::Identity();
  s.modes(0, 0) = std::sqrt(0.5);
  s.modes(1, 0) = -std::sqrt(0.5);
  CHECK_THROWS_AS(com_mode_index(s), DegeneracyError);
}

TEST_CASE("degenerate subspaces get a canonical basis") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(3, 3) * 2.0;
  h(2, 2) = 5.0;
  const ModeSpectrum a = normal_modes(h);
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(3, 3);
  const double t = 0.3;
  rot(0, 0) = std::cos(t);
  rot(0, 1) = -std::sin(t);
  rot(1, 0) = std::sin(t);
  rot(1, 1) = std::cos(t);
  const ModeSpectrum b = normal_modes(rot * h * rot.transpose());
  CHECK((a.modes - b.modes).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("participation sums") {
  const ModeSpectrum s = normal_modes(quartic15());
  std::vector<int> all(15);
  for (int i = 0; i < 15; ++i) all[i] = i;
  for (int m = 0; m < 15; ++m) CHECK(participation_sum(s, m, all) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<int> center{6, 7};
  const std::vector<int> edge{0, 1};
  CHECK(participation_sum(s, 0, center) > participation_sum(s, 0, edge));

  for (int nc : {1, 4, 9}) {
    const ModeSpectrum q = normal_modes(quadratic(9));
    const std::vector<int> c = centered_indices(9, nc);
    CHECK(participation_sum(q, 0, c) == doctest::Approx(nc / 9.0).epsilon(1e-10));
  }

  const std::vector<int> bad{15};
  CHECK_THROWS_AS(participation_sum(s, 0, bad), DomainError);
  CHECK_THROWS_AS(participation_sum(s, 15, center), DomainError);
}

TEST_CASE("COM frequency versus ion count") {
  // Fixed quartic trap: longer chains probe stiffer regions, so the COM
  // frequency rises with N.
  double prev = 0.0;
  for (int n = 10; n <= 30; n += 4) {
    const ModeSpectrum s = normal_modes(make_chain(kQuartic15, solve_equilibrium(kQuartic15, n), {}));
    CHECK(s.frequencies(0) > prev);
    prev = s.frequencies(0);
  }
  // Chains recalibrated to a fixed spacing grow softer instead.
  const Normalization norm = normalization_for_mass_u(171.0);
  prev = 1e9;
  for (int n = 16; n <= 28; n += 4) {
    const TrapPotential pot = calibrate_equispacing(n, 4.4e-6, norm).potential;
    const ModeSpectrum s = normal_modes(make_chain(pot, solve_equilibrium(pot, n), {}));
    CHECK(s.frequencies(0) < prev);
    prev = s.frequencies(0);
  }
}
