#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mce/quad.hpp"
#include "mce/special.hpp"

namespace mce {

/// Sampled extrinsic volume function r -> f(r) = Vol(B(y0,r) cap M) with
/// per-sample error bounds; the reusable core of entropy and EAVR work.
struct RadialProfile {
  AmbientVec center;
  int dim = 0;
  std::vector<double> r;       // strictly increasing
  std::vector<double> volume;  // f(r_i)
  std::vector<double> bound;   // per-sample error bound

  std::size_t size() const { return r.size(); }

  /// Monotone interpolant of f, piecewise linear in the squared radius
  /// (exact for cones; monotone since s^2 is). s in [0, r_K].
  double interpolate(double s) const;

  /// Derivative of the interpolant at s (the shell area estimate f').
  double interpolate_derivative(double s) const;
};

/// f_i = ball_volume at each grid radius; validates monotonicity of f and,
/// for surfaces declared minimal, of the density ratio f/r^n (beyond
/// quadrature slack). Violations throw QuadError.
RadialProfile build_profile(const Submanifold& M, const AmbientVec& y0,
                            const std::vector<double>& r_grid, const QuadSpec& spec = {});

/// Profile sampled from an exact closed-form volume function (zero bounds).
RadialProfile build_profile_from_function(const std::function<double(double)>& volume_fn,
                                          int dim, const AmbientVec& y0,
                                          const std::vector<double>& r_grid);

/// H(tau) from the profile alone: integration by parts eliminates the shell
/// area, every interval integrates in closed form against the Gaussian, and
/// the tail beyond r_K is bounded through the largest density ratio and the
/// upper incomplete gamma. The bracket is [no-tail - interp, no-tail + tail
/// + interp]; `converged` means the tail bound stayed below tail_rtol*value.
EntropyValue entropy_from_profile(const RadialProfile& p, double tau, double tail_rtol = 1e-2);

std::vector<EntropyValue> entropy_curve(const RadialProfile& p,
                                        const std::vector<double>& tau_grid,
                                        double tail_rtol = 1e-2);

struct EavrEstimate {
  double value = 0.0;  // last density ratio f_K / (omega_n r_K^n)
  double low = 0.0;    // largest computed ratio minus slack (monotonicity)
  double high = kInf;  // Richardson extrapolation in 1/r when admissible
  bool converged = false;
};

/// Density-ratio limit estimate. Converged when the last two ratios differ
/// by less than rtol*value and the extrapolated upper end is finite.
EavrEstimate eavr_estimate(const RadialProfile& p, double rtol = 5e-3);

struct BlowdownPoint {
  double r = 0.0;
  double normalized_volume = 0.0;  // f(r) / (omega_n r^n)
  double shell_ratio = 0.0;        // f'(r) / (n omega_n r^(n-1))
};

/// Rescaled-ball diagnostics at radius r_j (must lie within the profile).
BlowdownPoint blowdown(const RadialProfile& p, double r_j);

/// CSV emission: header comment line, then `r,volume,bound` rows at full
/// double precision.
void profile_to_csv(const RadialProfile& p, std::ostream& os, const std::string& comment);

/// CSV emission: `tau,entropy,bound_low,bound_high`.
void curve_to_csv(const std::vector<EntropyValue>& curve, std::ostream& os,
                  const std::string& comment);

}  // namespace mce
