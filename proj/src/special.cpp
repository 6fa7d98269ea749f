#include "mce/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mce {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kErfcSplit = 2.0;

// erf by its Maclaurin series; adequate for |x| < 2 where erfc has no
// catastrophic cancellation yet.
double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int k = 1; k < 80; ++k) {
    term *= -x2 / k;
    const double add = term / (2 * k + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return 2.0 / kSqrtPi * sum;
}

// Legendre continued fraction for erfc, evaluated with modified Lentz.
// erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
double erfc_cf(double x) {
  constexpr double tiny = 1e-300;
  double f = x, c = x, d = 0.0;
  if (f == 0.0) f = tiny;
  for (int k = 1; k < 200; ++k) {
    const double a = k * 0.5;
    d = x + a * d;
    if (d == 0.0) d = tiny;
    c = x + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x * x) / (kSqrtPi * f);
}

bool is_positive_half_integer(double a) {
  if (!(a > 0.0)) return false;
  const double twice = 2.0 * a;
  return std::abs(twice - std::round(twice)) < 1e-12;
}

}  // namespace

double erfc_accurate(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc_accurate(-x);
  if (x < kErfcSplit) return 1.0 - erf_series(x);
  if (x > 27.0) return 0.0;  // underflows double
  return erfc_cf(x);
}

double gamma_half_integer(double a) {
  if (!is_positive_half_integer(a))
    throw std::invalid_argument("gamma_half_integer: a must be a positive half-integer, got " +
                                std::to_string(a));
  double value = (std::abs(a - std::round(a)) < 0.25) ? 1.0 : kSqrtPi;
  double b = (std::abs(a - std::round(a)) < 0.25) ? 1.0 : 0.5;
  while (b + 0.25 < a) {
    value *= b;
    b += 1.0;
  }
  return value;
}

double incomplete_gamma_upper(double a, double x) {
  if (!is_positive_half_integer(a))
    throw std::invalid_argument("incomplete_gamma_upper: a must be a positive half-integer, got " +
                                std::to_string(a));
  if (x < 0.0) throw std::invalid_argument("incomplete_gamma_upper: x must be >= 0");

  const bool integer_a = std::abs(a - std::round(a)) < 0.25;
  double b = integer_a ? 1.0 : 0.5;
  double value = integer_a ? std::exp(-x) : kSqrtPi * erfc_accurate(std::sqrt(x));
  // Gamma(b+1, x) = b Gamma(b, x) + x^b e^-x, climbing b -> a.
  while (b + 0.25 < a) {
    double boundary;
    if (x == 0.0)
      boundary = 0.0;
    else
      boundary = std::exp(b * std::log(x) - x);
    value = b * value + boundary;
    b += 1.0;
  }
  return value;
}

double regularized_gamma_upper(double a, double x) {
  return incomplete_gamma_upper(a, x) / gamma_half_integer(a);
}

double unit_ball_volume(int n) {
  if (n < 1 || n > 10)
    throw std::invalid_argument("unit_ball_volume: n must be in [1, 10], got " +
                                std::to_string(n));
  // omega_n = omega_{n-2} * 2 pi / n, omega_0 = 1, omega_1 = 2.
  double even = 1.0, odd = 2.0;
  for (int k = 2; k <= n; ++k) {
    if (k % 2 == 0)
      even *= 2.0 * M_PI / k;
    else
      odd *= 2.0 * M_PI / k;
  }
  return (n % 2 == 0) ? even : odd;
}

double normalization_identity(int n) {
  const double omega = unit_ball_volume(n);
  const double value =
      omega * (n / 2.0) * std::pow(M_PI, -n / 2.0) * gamma_half_integer(n / 2.0);
  return std::abs(value - 1.0);
}

}  // namespace mce
