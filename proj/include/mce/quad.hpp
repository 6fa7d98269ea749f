#pragma once

#include <utility>
#include <vector>

#include "mce/geom.hpp"
#include "mce/types.hpp"

namespace mce {

/// Controls for the adaptive Gaussian-weighted quadrature.
struct QuadSpec {
  double eps = 1e-6;          // target relative error
  int max_subdivisions = 20000;  // total cell-refinement budget per call
  int init_cells = 4;         // initial grid, cells per axis
  int clip_depth = 30;        // max ball-clip bisection depth per root cell
  double c_tail = 1.5;        // truncation safety factor

  void validate() const;
};

/// A computed Gaussian-weighted area value with an explicit error bracket.
/// `value` is the quadrature result over the truncated region; the bracket
/// adds the quadrature discrepancy on both sides and the area-growth tail
/// bound on the high side.
struct EntropyValue {
  double tau = 0.0;
  double value = 0.0;
  double bound_low = 0.0;   // bracket endpoint, <= value
  double bound_high = 0.0;  // bracket endpoint, >= value
  bool converged = false;

  double error_bound() const {
    return std::max(value - bound_low, bound_high - value);
  }
};

struct BallVolume {
  double r = 0.0;
  double value = 0.0;
  double bound = 0.0;
  bool converged = false;
};

/// Direct evaluation of int_M (4 pi tau)^(-n/2) exp(-|x-y0|^2 / 4 tau) dmu
/// by adaptive tensor-product Gauss-Legendre over chart cells. Unbounded
/// axes are truncated at ambient radius R_cut = c_tail sqrt(4 tau ln(1/eps'))
/// + offset, with the tail bounded through the area-growth estimate
/// A(s) <= ratio_sup n omega_n s^(n-1) and the upper incomplete gamma.
EntropyValue huisken_direct(const Submanifold& M, const AmbientVec& y0, double tau,
                            const QuadSpec& spec = {});

/// Area of {|X - y0| <= r} on M. Cells straddling the sphere are bisected
/// until the straddling layer is negligible, then attributed by the inside
/// fraction of a 16^n midpoint subsample.
BallVolume ball_volume(const Submanifold& M, const AmbientVec& y0, double r,
                       const QuadSpec& spec = {});

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_rule(int order);

/// Finite per-axis integration window for {|X - y0| <= radius} on one chart.
/// Finite axes keep their declared range; periodic axes span one period;
/// unbounded axes are found by doubling search + bisection. Throws QuadError
/// if the region cannot be bracketed.
std::vector<std::pair<double, double>> chart_window_for_radius(const ImmersionChart& chart,
                                                               const AmbientVec& y0,
                                                               double radius);

}  // namespace detail

}  // namespace mce
