#include <doctest.h>

#include <cmath>
#include <random>

#include "mce/special.hpp"
#include "oracles.hpp"

using namespace mce;

TEST_SUITE_BEGIN("special");

TEST_CASE("erfc against the standard library across the split") {
  for (double x = 0.0; x <= 8.0; x += 0.03125) {
    const double ref = std::erfc(x);
    CHECK(std::abs(erfc_accurate(x) - ref) <= 2e-12 * std::max(ref, 1e-300));
  }
  CHECK(erfc_accurate(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(erfc_accurate(-1.0) == doctest::Approx(2.0 - std::erfc(1.0)).epsilon(1e-14));
  // Pinned values around the series/continued-fraction split at 2.0.
  CHECK(std::abs(erfc_accurate(1.0) - 0.157299207050285130658779364917) < 2e-14);
  CHECK(std::abs(erfc_accurate(2.0) - 0.00467773498104726583793074363275) < 2e-15);
  CHECK(std::abs(erfc_accurate(3.5) - 7.43098372341412745523683756096e-7) < 1e-18);
}

TEST_CASE("incomplete gamma bases and pinned examples") {
  CHECK(std::abs(incomplete_gamma_upper(1.0, 0.5) - 0.606530659712633423603799534991) < 1e-14);
  CHECK(std::abs(incomplete_gamma_upper(0.5, 0.0) - 1.77245385090551602729816748334) < 1e-14);
  CHECK(std::abs(incomplete_gamma_upper(1.5, 1.0) - 0.5072822338117733098451400757) < 1e-13);
}

TEST_CASE("incomplete gamma rejects unsupported orders") {
  CHECK_THROWS_AS(incomplete_gamma_upper(0.75, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(incomplete_gamma_upper(-0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(incomplete_gamma_upper(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("Gamma(a, 0) equals the complete half-integer Gamma") {
  for (double a = 0.5; a <= 5.0; a += 0.5)
    CHECK(incomplete_gamma_upper(a, 0.0) ==
          doctest::Approx(gamma_half_integer(a)).epsilon(1e-14));
}

TEST_CASE("incomplete gamma is monotone decreasing in x") {
  for (double a : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    double prev = incomplete_gamma_upper(a, 0.0);
    for (double x = 0.25; x <= 12.0; x += 0.25) {
      const double cur = incomplete_gamma_upper(a, x);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("incomplete gamma derivative matches -x^(a-1) e^-x") {
  const double h = 1e-6;
  for (double a : {1.0, 1.5, 2.0, 3.5}) {
    for (double x : {0.5, 1.0, 2.0, 5.0, 9.0}) {
      const double fd =
          (incomplete_gamma_upper(a, x + h) - incomplete_gamma_upper(a, x - h)) / (2.0 * h);
      const double exact = -std::pow(x, a - 1.0) * std::exp(-x);
      CHECK(std::abs(fd - exact) <= 1e-7 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("incomplete gamma against the quadrature oracle on random pairs") {
  std::mt19937_64 rng(20240917);
  std::uniform_int_distribution<int> half(1, 9);  // a = half/2 <= 9/2
  std::uniform_real_distribution<double> xs(0.0, 30.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = half(rng) * 0.5;
    const double x = xs(rng);
    const double mine = incomplete_gamma_upper(a, x);
    const double ref = oracles::gamma_upper_by_quadrature(a, x);
    CHECK(std::abs(mine - ref) <= 1e-10 * std::max(std::abs(ref), 1e-300));
  }
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.18879020478639098461685784437).epsilon(1e-15));
  CHECK(unit_ball_volume(4) == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-15));
  CHECK_THROWS_AS(unit_ball_volume(0), std::invalid_argument);
  CHECK_THROWS_AS(unit_ball_volume(11), std::invalid_argument);
}

TEST_CASE("normalization identity residual vanishes for n in [1,10]") {
  CHECK(normalization_identity(2) == 0.0);  // pi * 1 * pi^-1 * 1
  CHECK(normalization_identity(1) < 1e-15);
  CHECK(normalization_identity(3) < 1e-13);
  for (int n = 1; n <= 10; ++n) CHECK(normalization_identity(n) < 1e-12);
}

TEST_SUITE_END();
