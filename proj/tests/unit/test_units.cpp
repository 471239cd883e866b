#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ioncool/errors.hpp"
#include "ioncool/units.hpp"

using namespace ioncool;

TEST_CASE("length unit for 171Yb+ matches a direct evaluation") {
  const Normalization n = normalization_for_mass_u(171.0);
  // (e^2 / (4 pi eps0 m (2 pi 1 MHz)^2))^(1/3), CODATA 2018, evaluated separately.
  CHECK(n.d0 == doctest::Approx(2.7404323335924927e-6).epsilon(1e-12));
  CHECK(n.omega_unit == doctest::Approx(2.0 * std::numbers::pi * 1e6).epsilon(1e-15));
}

TEST_CASE("normalization satisfies its defining relations") {
  for (double m_u : {1.0, 40.0, 171.0, 172.0, 9.0}) {
    const Normalization n = normalization_for_mass_u(m_u);
    CHECK(n.d0 > 0.0);
    CHECK(n.E0 > 0.0);
    CHECK(n.E0 == doctest::Approx(constants::coulomb_constant_e2 / n.d0).epsilon(1e-12));
    CHECK(std::pow(n.d0, 3) * n.mass * n.omega_unit * n.omega_unit ==
          doctest::Approx(constants::coulomb_constant_e2).epsilon(1e-12));
  }
}

TEST_CASE("length unit follows the cube-root mass law") {
  const double m = 171.0 * constants::atomic_mass_unit;
  CHECK(normalization_for(8.0 * m).d0 == doctest::Approx(normalization_for(m).d0 / 2.0).epsilon(1e-14));
  CHECK(normalization_for_mass_u(172.0).d0 ==
        doctest::Approx(normalization_for_mass_u(171.0).d0 * std::cbrt(171.0 / 172.0)).epsilon(1e-14));
}

TEST_CASE("non-positive mass is rejected") {
  CHECK_THROWS_AS(normalization_for(0.0), DomainError);
  CHECK_THROWS_AS(normalization_for(-1.0), DomainError);
  CHECK_THROWS_AS(normalization_for(std::nan("")), DomainError);
}

TEST_CASE("rate and time conversions") {
  CHECK(rate_to_si(0.0) == 0.0);
  CHECK(rate_to_si(5.328e-5) == doctest::Approx(5.328e-5 * 2.0 * std::numbers::pi * 1e6).epsilon(1e-15));
  CHECK(time_to_normalized(1e-6) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
  for (double v : {1e-9, 3.7e-3, 1.0, 42.0, 6.02e23}) {
    CHECK(rate_to_normalized(rate_to_si(v)) == doctest::Approx(v).epsilon(1e-15));
    CHECK(time_to_si(time_to_normalized(v)) == doctest::Approx(v).epsilon(1e-15));
  }
}
