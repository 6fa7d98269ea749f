#pragma once

namespace mce {

/// Complementary error function, series/continued-fraction split at |x| = 2.
double erfc_accurate(double x);

/// Gamma(a) for positive half-integer a (a = 1/2, 1, 3/2, ...), by exact
/// recursion from Gamma(1) = 1 and Gamma(1/2) = sqrt(pi).
double gamma_half_integer(double a);

/// Upper incomplete gamma Gamma(a, x) = int_x^inf e^-t t^(a-1) dt for
/// positive half-integer a and x >= 0. Bases: Gamma(1,x) = e^-x and
/// Gamma(1/2,x) = sqrt(pi) erfc(sqrt(x)); recursion
/// Gamma(a+1,x) = a Gamma(a,x) + x^a e^-x.
double incomplete_gamma_upper(double a, double x);

/// Regularized Q(a, x) = Gamma(a, x) / Gamma(a).
double regularized_gamma_upper(double a, double x);

/// Volume of the unit n-ball, pi^(n/2) / Gamma(n/2 + 1), for 1 <= n <= 10.
double unit_ball_volume(int n);

/// Residual |omega_n * (n/2) * pi^(-n/2) * Gamma(n/2) - 1|; must vanish.
double normalization_identity(int n);

}  // namespace mce
