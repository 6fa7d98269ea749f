#include "mce/profile.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mce/util.hpp"

namespace mce {

namespace {

// Segment i spans [r_i, r_{i+1}] (with a leading [0, r_1] cone segment);
// fhat(s) = a + b s^2 on each segment, slopes clamped to keep fhat monotone.
struct Segments {
  std::vector<double> lo, hi;   // radii
  std::vector<double> a, b;     // fhat coefficients
  std::vector<double> clamp_loss;  // |negative slope mass| folded into bounds
};

Segments build_segments(const RadialProfile& p) {
  const std::size_t K = p.size();
  Segments seg;
  auto push = [&](double rlo, double rhi, double flo, double fhi) {
    const double xi_lo = rlo * rlo, xi_hi = rhi * rhi;
    double b = (fhi - flo) / (xi_hi - xi_lo);
    double loss = 0.0;
    if (b < 0.0) {
      loss = (flo - fhi);
      b = 0.0;
    }
    seg.lo.push_back(rlo);
    seg.hi.push_back(rhi);
    seg.b.push_back(b);
    seg.a.push_back(flo - b * xi_lo);
    seg.clamp_loss.push_back(loss);
  };
  push(0.0, p.r[0], 0.0, p.volume[0]);
  for (std::size_t i = 0; i + 1 < K; ++i)
    push(p.r[i], p.r[i + 1], p.volume[i], p.volume[i + 1]);
  return seg;
}

std::size_t find_segment(const Segments& seg, double s) {
  // Last segment whose lo <= s; segments tile [0, r_K].
  std::size_t idx = 0;
  for (std::size_t i = 0; i < seg.lo.size(); ++i) {
    if (s >= seg.lo[i]) idx = i;
  }
  return idx;
}

}  // namespace

double RadialProfile::interpolate(double s) const {
  if (s <= 0.0) return 0.0;
  const Segments seg = build_segments(*this);
  if (s >= r.back()) return volume.back();
  const std::size_t i = find_segment(seg, s);
  return seg.a[i] + seg.b[i] * s * s;
}

double RadialProfile::interpolate_derivative(double s) const {
  if (s <= 0.0) return 0.0;
  const Segments seg = build_segments(*this);
  const std::size_t i = find_segment(seg, std::min(s, r.back()));
  return 2.0 * seg.b[i] * s;
}

RadialProfile build_profile(const Submanifold& M, const AmbientVec& y0,
                            const std::vector<double>& r_grid, const QuadSpec& spec) {
  if (r_grid.empty()) throw std::invalid_argument("build_profile: empty radius grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0.0)) throw std::invalid_argument("build_profile: radii must be > 0");
    if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
      throw std::invalid_argument("build_profile: radii must be strictly increasing");
  }

  RadialProfile p;
  p.center = y0;
  p.dim = M.dim;
  p.r = r_grid;
  p.volume.assign(r_grid.size(), 0.0);
  p.bound.assign(r_grid.size(), 0.0);

  parallel_for(static_cast<int>(r_grid.size()), [&](int i) {
    const BallVolume bv = ball_volume(M, y0, r_grid[i], spec);
    p.volume[i] = bv.value;
    p.bound[i] = bv.bound;
  });

  // f must be nondecreasing within quadrature slack.
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double slack = p.bound[i] + p.bound[i + 1] + 1e-12;
    if (p.volume[i + 1] < p.volume[i] - slack)
      throw QuadError("build_profile: volume decreases from r = " + format_g(p.r[i], 6) +
                      " to r = " + format_g(p.r[i + 1], 6) +
                      " beyond quadrature slack (quadrature failure or invalid surface)");
  }

  // Density monotonicity for surfaces declared minimal.
  if (M.declared_minimal) {
    const double omega = unit_ball_volume(M.dim);
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        const double rho_i = p.volume[i] / (omega * std::pow(p.r[i], M.dim));
        const double rho_j = p.volume[j] / (omega * std::pow(p.r[j], M.dim));
        const double slack = (p.bound[i] / (omega * std::pow(p.r[i], M.dim))) +
                             (p.bound[j] / (omega * std::pow(p.r[j], M.dim))) + 1e-12;
        if (rho_j < rho_i - slack)
          throw QuadError(
              "build_profile: density ratio decreases beyond quadrature slack between r = " +
              format_g(p.r[i], 6) + " and r = " + format_g(p.r[j], 6) +
              " on a surface declared minimal (quadrature failure or wrong declaration)");
      }
    }
  }
  return p;
}

RadialProfile build_profile_from_function(const std::function<double(double)>& volume_fn,
                                          int dim, const AmbientVec& y0,
                                          const std::vector<double>& r_grid) {
  RadialProfile p;
  p.center = y0;
  p.dim = dim;
  p.r = r_grid;
  p.volume.reserve(r_grid.size());
  p.bound.assign(r_grid.size(), 0.0);
  for (double r : r_grid) p.volume.push_back(volume_fn(r));
  return p;
}

EntropyValue entropy_from_profile(const RadialProfile& p, double tau, double tail_rtol) {
  if (!(tau > 0.0)) throw std::invalid_argument("entropy_from_profile: tau must be > 0");
  if (p.size() < 2) throw std::invalid_argument("entropy_from_profile: need >= 2 samples");

  const int n = p.dim;
  const double omega = unit_ball_volume(n);
  const double norm = std::pow(4.0 * M_PI * tau, -0.5 * n);
  const double rK = p.r.back();
  const double fK = p.volume.back();

  const Segments seg = build_segments(p);

  // eta = s^2 / 4 tau; per segment:
  //   W0 = int (s/2tau) w ds             = norm (e^-eta_lo - e^-eta_hi)
  //   W2 = int (s/2tau) w s^2 ds         = norm 4 tau (Gamma(2,eta_lo) - Gamma(2,eta_hi))
  std::vector<double> parts;
  parts.reserve(seg.lo.size() + 1);
  std::vector<double> masses(seg.lo.size());  // W0 per segment, for bound propagation
  for (std::size_t i = 0; i < seg.lo.size(); ++i) {
    const double eta_lo = seg.lo[i] * seg.lo[i] / (4.0 * tau);
    const double eta_hi = seg.hi[i] * seg.hi[i] / (4.0 * tau);
    const double w0 = norm * (std::exp(-eta_lo) - std::exp(-eta_hi));
    const double w2 = norm * 4.0 * tau *
                      (incomplete_gamma_upper(2.0, eta_lo) - incomplete_gamma_upper(2.0, eta_hi));
    masses[i] = w0;
    parts.push_back(seg.a[i] * w0 + seg.b[i] * w2);
  }
  const double w_rK = norm * std::exp(-rK * rK / (4.0 * tau));
  parts.push_back(w_rK * fK);
  const double no_tail = pairwise_sum(parts);

  // Interpolation error: |f - fhat| <= (dxi^2 / 8) |f''_xi| per segment, with
  // the curvature estimated from neighboring second divided differences in xi.
  std::vector<double> dd(seg.lo.size(), 0.0);
  for (std::size_t i = 0; i + 1 < seg.lo.size(); ++i) {
    // slopes of segments i and i+1 in xi
    const double change = std::abs(seg.b[i + 1] - seg.b[i]);
    const double width = seg.hi[i + 1] * seg.hi[i + 1] - seg.lo[i] * seg.lo[i];
    const double curv = 2.0 * change / std::max(width, 1e-300);
    dd[i] = std::max(dd[i], curv);
    dd[i + 1] = std::max(dd[i + 1], curv);
  }
  double interp_err = 0.0;
  for (std::size_t i = 0; i < seg.lo.size(); ++i) {
    const double dxi = seg.hi[i] * seg.hi[i] - seg.lo[i] * seg.lo[i];
    interp_err += (dxi * dxi / 8.0) * dd[i] * masses[i] + seg.clamp_loss[i] * masses[i];
  }

  // Propagated sample bounds: each f_i enters linearly with hat mass <= the
  // Gaussian mass of its two segments (plus the boundary term for f_K).
  double prop_err = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double mass = 0.0;
    if (i + 1 < seg.lo.size()) mass += masses[i + 1];  // segment [r_i, r_i+1]
    mass += masses[i];                                 // segment ending at r_i
    prop_err += p.bound[i] * mass;
  }
  prop_err += p.bound.back() * w_rK;

  // Tail beyond r_K through the largest density ratio.
  double ratio_high = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    ratio_high = std::max(ratio_high,
                          (p.volume[i] + p.bound[i]) / (omega * std::pow(p.r[i], n)));
  const double tail =
      ratio_high * regularized_gamma_upper(0.5 * n, rK * rK / (4.0 * tau));

  EntropyValue ev;
  ev.tau = tau;
  ev.value = no_tail;
  ev.bound_low = no_tail - interp_err - prop_err;
  ev.bound_high = no_tail + tail + interp_err + prop_err;
  ev.converged = tail <= tail_rtol * std::max(std::abs(no_tail), 1e-300);
  return ev;
}

std::vector<EntropyValue> entropy_curve(const RadialProfile& p,
                                        const std::vector<double>& tau_grid, double tail_rtol) {
  std::vector<EntropyValue> curve(tau_grid.size());
  parallel_for(static_cast<int>(tau_grid.size()),
               [&](int i) { curve[i] = entropy_from_profile(p, tau_grid[i], tail_rtol); });
  return curve;
}

EavrEstimate eavr_estimate(const RadialProfile& p, double rtol) {
  if (p.size() < 3) throw std::invalid_argument("eavr_estimate: need >= 3 samples");
  const int n = p.dim;
  const double omega = unit_ball_volume(n);
  const std::size_t K = p.size();

  std::vector<double> rho(K), brho(K);
  for (std::size_t i = 0; i < K; ++i) {
    const double denom = omega * std::pow(p.r[i], n);
    rho[i] = p.volume[i] / denom;
    brho[i] = p.bound[i] / denom;
  }

  EavrEstimate est;
  est.value = rho[K - 1];

  double low = -kInf;
  for (std::size_t i = 0; i < K; ++i) low = std::max(low, rho[i] - brho[i]);
  est.low = std::min(low, est.value);

  // Richardson in 1/r from the last three ratios, admissible when they are
  // nondecreasing with slopes (in x = 1/r) non-increasing: then the linear
  // extrapolation to x = 0 bounds the limit from above.
  const double x1 = 1.0 / p.r[K - 3], x2 = 1.0 / p.r[K - 2], x3 = 1.0 / p.r[K - 1];
  const double q1 = rho[K - 3], q2 = rho[K - 2], q3 = rho[K - 1];
  const double slack3 = brho[K - 3] + brho[K - 2] + brho[K - 1] + 1e-12;
  const bool monotone = (q2 >= q1 - slack3) && (q3 >= q2 - slack3);
  const double s32 = (q2 - q3) / (x2 - x3);  // x3 < x2
  const double s21 = (q1 - q2) / (x1 - x2);
  const bool concave = s21 <= s32 + slack3 / std::max(x1 - x2, 1e-300);
  if (monotone && concave) {
    const double extrapolated = q3 - x3 * s32;
    est.high = std::max(est.value, extrapolated) + slack3;
  } else {
    est.high = kInf;
  }

  const double step = std::abs(rho[K - 1] - rho[K - 2]);
  est.converged = std::isfinite(est.high) &&
                  step < rtol * std::max(std::abs(est.value), 1e-300);
  return est;
}

BlowdownPoint blowdown(const RadialProfile& p, double r_j) {
  if (p.size() < 2) throw std::invalid_argument("blowdown: need >= 2 samples");
  if (r_j < p.r.front() || r_j > p.r.back())
    throw std::invalid_argument("blowdown: r_j = " + format_g(r_j, 6) +
                                " outside profile range [" + format_g(p.r.front(), 6) + ", " +
                                format_g(p.r.back(), 6) + "]");
  const int n = p.dim;
  const double omega = unit_ball_volume(n);

  BlowdownPoint bp;
  bp.r = r_j;
  bp.normalized_volume = p.interpolate(r_j) / (omega * std::pow(r_j, n));

  // Shell estimate: central difference in xi = s^2 across the bracketing
  // samples when r_j is an interior grid point, else the segment slope.
  double fprime;
  std::size_t hit = p.size();
  for (std::size_t i = 0; i < p.size(); ++i)
    if (std::abs(p.r[i] - r_j) <= 1e-12 * std::max(1.0, r_j)) hit = i;
  if (hit != p.size() && hit > 0 && hit + 1 < p.size()) {
    const double dxi = p.r[hit + 1] * p.r[hit + 1] - p.r[hit - 1] * p.r[hit - 1];
    fprime = 2.0 * r_j * (p.volume[hit + 1] - p.volume[hit - 1]) / dxi;
  } else {
    fprime = p.interpolate_derivative(r_j);
  }
  bp.shell_ratio = fprime / (n * omega * std::pow(r_j, n - 1));
  return bp;
}

void profile_to_csv(const RadialProfile& p, std::ostream& os, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << "\n";
  os << "r,volume,bound\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    os << format_g17(p.r[i]) << "," << format_g17(p.volume[i]) << "," << format_g17(p.bound[i])
       << "\n";
}

void curve_to_csv(const std::vector<EntropyValue>& curve, std::ostream& os,
                  const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << "\n";
  os << "tau,entropy,bound_low,bound_high\n";
  for (const EntropyValue& ev : curve)
    os << format_g17(ev.tau) << "," << format_g17(ev.value) << "," << format_g17(ev.bound_low)
       << "," << format_g17(ev.bound_high) << "\n";
}

}  // namespace mce
