#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mce/types.hpp"

namespace mce {

/// Gram determinants at or below this are treated as a degenerate
/// parametrization (double-precision floor with margin).
inline constexpr double kGramDetTol = 1e-14;

/// Parameter window used when sampling an unbounded axis (minimality checks
/// and jet cross-validation; quadrature truncates by ambient radius instead).
inline constexpr double kUnboundedSampleWindow = 5.0;

/// Full second-order jet of an immersion at one parameter point.
struct ChartJet {
  AmbientVec position;    // X(u), ambient_dim entries
  JacobianMat jacobian;   // DX(u), ambient_dim x n
  // Second derivatives, flattened: row a holds the n x n matrix of
  // d^2 X_a / du_i du_j in row-major order.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbientDim,
                kMaxParamDim * kMaxParamDim>
      hessian;
  int n = 0;

  double hess(int a, int i, int j) const { return hessian(a, i * n + j); }
  double& hess(int a, int i, int j) { return hessian(a, i * n + j); }

  void resize(int ambient, int dim) {
    n = dim;
    position.setZero(ambient);
    jacobian.setZero(ambient, dim);
    hessian.setZero(ambient, dim * dim);
  }
};

/// A smooth map from a parameter box in R^n into R^(n+m) with exact 2-jet.
struct ImmersionChart {
  std::string label;
  std::vector<AxisRange> domain;  // size n
  int ambient_dim = 0;
  std::function<ChartJet(const ParamVec&)> jet;

  int dim() const { return static_cast<int>(domain.size()); }
};

/// A finite collection of charts covering M up to measure zero.
struct Submanifold {
  std::vector<ImmersionChart> charts;
  int dim = 0;
  int ambient_dim = 0;
  bool declared_minimal = false;
};

struct DegenerateChartError : std::runtime_error {
  DegenerateChartError(const std::string& chart, const ParamVec& u, double gram_det);
};

/// sqrt(det(DX^T DX)) — the n-dimensional area density of the chart at u.
/// Throws DegenerateChartError when the Gram determinant is <= kGramDetTol.
double gram_area_element(const ImmersionChart& chart, const ParamVec& u);

/// Area density computed from an already-evaluated jet.
double gram_area_element(const ImmersionChart& chart, const ParamVec& u, const ChartJet& jet);

/// Mean curvature vector H = g^{ij} (d^2 X / du_i du_j)^perp with
/// g = DX^T DX; the round unit sphere in R^3 has |H| = 2 in this convention.
AmbientVec mean_curvature_vector(const ImmersionChart& chart, const ParamVec& u);
AmbientVec mean_curvature_vector(const ImmersionChart& chart, const ParamVec& u,
                                 const ChartJet& jet);

struct MinimalityResult {
  bool pass = false;
  double max_mean_curvature = 0.0;
  std::string worst_chart;
  ParamVec worst_point;
};

/// Deterministically samples every chart on a low-discrepancy lattice (seeded
/// by chart index) and reports the largest |H| found against `tol`.
/// Unbounded axes are sampled over [-kUnboundedSampleWindow, +...].
MinimalityResult check_minimality(const Submanifold& M, int sample_count, double tol,
                                  std::uint64_t seed = 0);

/// Lattice sample point k for one chart (exposed for tests and samplers).
ParamVec chart_sample_point(const ImmersionChart& chart, std::uint64_t seed,
                            std::uint64_t chart_index, std::int64_t k);

}  // namespace mce
