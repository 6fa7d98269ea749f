#include "mce/geom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mce/util.hpp"

namespace mce {

namespace {

std::string describe_point(const ParamVec& u) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < u.size(); ++i) {
    if (i) os << ", ";
    os << format_g(u[i], 9);
  }
  os << ")";
  return os.str();
}

}  // namespace

DegenerateChartError::DegenerateChartError(const std::string& chart, const ParamVec& u,
                                           double gram_det)
    : std::runtime_error("degenerate chart '" + chart + "' at u = " + describe_point(u) +
                         ": Gram determinant " + format_g(gram_det, 6) +
                         " <= " + format_g(kGramDetTol, 3)) {}

double gram_area_element(const ImmersionChart& chart, const ParamVec& u) {
  return gram_area_element(chart, u, chart.jet(u));
}

double gram_area_element(const ImmersionChart& chart, const ParamVec& u, const ChartJet& jet) {
  const ParamMat gram = jet.jacobian.transpose() * jet.jacobian;
  const double det = gram.determinant();
  if (!(det > kGramDetTol)) throw DegenerateChartError(chart.label, u, det);
  return std::sqrt(det);
}

AmbientVec mean_curvature_vector(const ImmersionChart& chart, const ParamVec& u) {
  return mean_curvature_vector(chart, u, chart.jet(u));
}

AmbientVec mean_curvature_vector(const ImmersionChart& chart, const ParamVec& u,
                                 const ChartJet& jet) {
  const int n = jet.n;
  const int ambient = static_cast<int>(jet.position.size());
  const ParamMat gram = jet.jacobian.transpose() * jet.jacobian;
  const double det = gram.determinant();
  if (!(det > kGramDetTol)) throw DegenerateChartError(chart.label, u, det);
  const ParamMat gram_inv = gram.inverse();

  // Trace of the second derivatives against g^{ij}, per ambient coordinate.
  AmbientVec trace(ambient);
  for (int a = 0; a < ambient; ++a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += gram_inv(i, j) * jet.hess(a, i, j);
    trace[a] = s;
  }

  // Normal projection: H = trace - DX g^{-1} DX^T trace.
  const ParamVec coeff = gram_inv * (jet.jacobian.transpose() * trace);
  return trace - jet.jacobian * coeff;
}

ParamVec chart_sample_point(const ImmersionChart& chart, std::uint64_t seed,
                            std::uint64_t chart_index, std::int64_t k) {
  const int n = chart.dim();
  ParamVec u(n);
  for (int a = 0; a < n; ++a) {
    const double t = lattice_coord(seed, chart_index, a, n, k);
    const AxisRange& axis = chart.domain[a];
    double lo = axis.lo, hi = axis.hi;
    if (!std::isfinite(lo)) lo = std::max(-kUnboundedSampleWindow, axis.lo);
    if (!std::isfinite(hi)) hi = std::min(kUnboundedSampleWindow, axis.hi);
    u[a] = lo + t * (hi - lo);
  }
  return u;
}

MinimalityResult check_minimality(const Submanifold& M, int sample_count, double tol,
                                  std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("check_minimality: sample_count must be >= 1");
  MinimalityResult result;
  result.max_mean_curvature = 0.0;

  const int charts = static_cast<int>(M.charts.size());
  const int per_chart = (sample_count + charts - 1) / charts;

  std::vector<double> chart_max(charts, -1.0);
  std::vector<ParamVec> chart_arg(charts);
  parallel_for(charts, [&](int c) {
    const ImmersionChart& chart = M.charts[c];
    for (int k = 0; k < per_chart; ++k) {
      const ParamVec u =
          chart_sample_point(chart, seed, static_cast<std::uint64_t>(c), k);
      const double h = mean_curvature_vector(chart, u).norm();
      if (h > chart_max[c]) {
        chart_max[c] = h;
        chart_arg[c] = u;
      }
    }
  });
  for (int c = 0; c < charts; ++c) {
    if (chart_max[c] > result.max_mean_curvature) {
      result.max_mean_curvature = chart_max[c];
      result.worst_chart = M.charts[c].label;
      result.worst_point = chart_arg[c];
    }
  }

  result.pass = result.max_mean_curvature <= tol;
  return result;
}

}  // namespace mce
