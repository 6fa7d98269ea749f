#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace mce {

// Parameter dimension n and ambient dimension n+m are small and known only at
// runtime; fixed-capacity Eigen types keep every evaluation allocation-free.
inline constexpr int kMaxParamDim = 3;
inline constexpr int kMaxAmbientDim = 8;

using ParamVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxParamDim, 1>;
using AmbientVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbientDim, 1>;
using ParamMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxParamDim, kMaxParamDim>;
using JacobianMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbientDim, kMaxParamDim>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One axis of a chart's parameter box. Bounds may be +-infinity; periodic
/// axes are finite and integrated over exactly one period.
struct AxisRange {
  double lo = -kInf;
  double hi = kInf;
  bool periodic = false;

  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  double length() const { return hi - lo; }
};

struct QuadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mce
