// Test-only oracles, independent of the implementation paths they check:
// central finite differences for jets, adaptive Simpson quadrature for
// one-dimensional integrals, and fixed-grid counting for ball volumes.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "mce/geom.hpp"

namespace oracles {

// Central-difference Jacobian of the chart position map, step scaled by the
// parameter magnitude.
inline mce::JacobianMat fd_jacobian(const mce::ImmersionChart& chart, const mce::ParamVec& u,
                                    double h0 = 1e-5) {
  const int n = chart.dim();
  const int ambient = chart.ambient_dim;
  mce::JacobianMat jac(ambient, n);
  for (int i = 0; i < n; ++i) {
    const double h = h0 * std::max(1.0, std::abs(u[i]));
    mce::ParamVec up = u, um = u;
    up[i] += h;
    um[i] -= h;
    jac.col(i) = (chart.jet(up).position - chart.jet(um).position) / (2.0 * h);
  }
  return jac;
}

// Central-difference Hessian (4-point mixed stencil off-diagonal).
inline void fd_hessian(const mce::ImmersionChart& chart, const mce::ParamVec& u, int a, int i,
                       int j, double& out, double h0 = 1e-5) {
  const double hi = h0 * std::max(1.0, std::abs(u[i]));
  const double hj = h0 * std::max(1.0, std::abs(u[j]));
  if (i == j) {
    mce::ParamVec up = u, um = u;
    up[i] += hi;
    um[i] -= hi;
    out = (chart.jet(up).position[a] - 2.0 * chart.jet(u).position[a] +
           chart.jet(um).position[a]) /
          (hi * hi);
    return;
  }
  mce::ParamVec upp = u, upm = u, ump = u, umm = u;
  upp[i] += hi;
  upp[j] += hj;
  upm[i] += hi;
  upm[j] -= hj;
  ump[i] -= hi;
  ump[j] += hj;
  umm[i] -= hi;
  umm[j] -= hj;
  out = (chart.jet(upp).position[a] - chart.jet(upm).position[a] - chart.jet(ump).position[a] +
         chart.jet(umm).position[a]) /
        (4.0 * hi * hj);
}

// Adaptive Simpson integration to a tight absolute/relative tolerance.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("adaptive_simpson: depth exhausted");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

// Independent evaluation of the upper incomplete gamma by direct quadrature
// of its defining integral (plus an analytically negligible remainder).
inline double gamma_upper_by_quadrature(double a, double x) {
  // Integrate to where the integrand underflows relative accuracy.
  double hi = std::max(x + 60.0, 60.0);
  const auto f = [a](double t) { return std::exp(-t) * std::pow(t, a - 1.0); };
  if (x == 0.0 && a < 1.0) {
    // Integrable singularity at 0: substitute t = s^(1/(a)) ... handled by
    // splitting at 1 and transforming t = s^2 on [0,1] for a = 1/2.
    const auto g = [a](double s) { return 2.0 * s * std::exp(-s * s) * std::pow(s * s, a - 1.0); };
    return adaptive_simpson(g, 1e-12, 1.0, 1e-14) + adaptive_simpson(f, 1.0, hi, 1e-14);
  }
  const double lo = std::max(x, 1e-300);
  return adaptive_simpson(f, lo, hi, 1e-14);
}

// Fixed-grid midpoint counting of the chart area inside an ambient ball;
// the dense brute-force cross-check for the adaptive clipped integrator.
inline double brute_force_ball_volume(const mce::ImmersionChart& chart, const mce::AmbientVec& y0,
                                      double r, double ulo, double uhi, double vlo, double vhi,
                                      int cells_u, int cells_v) {
  const double hu = (uhi - ulo) / cells_u;
  const double hv = (vhi - vlo) / cells_v;
  double sum = 0.0;
  for (int i = 0; i < cells_u; ++i) {
    for (int j = 0; j < cells_v; ++j) {
      mce::ParamVec u(2);
      u[0] = ulo + (i + 0.5) * hu;
      u[1] = vlo + (j + 0.5) * hv;
      const mce::ChartJet jet = chart.jet(u);
      if ((jet.position - y0).norm() <= r)
        sum += mce::gram_area_element(chart, u, jet) * hu * hv;
    }
  }
  return sum;
}

}  // namespace oracles
