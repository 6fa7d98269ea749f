#include "mce/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

#include "mce/special.hpp"
#include "mce/util.hpp"

namespace mce {

void QuadSpec::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("QuadSpec: eps must be in (0, 1)");
  if (max_subdivisions < 1 || init_cells < 1 || clip_depth < 1)
    throw std::invalid_argument("QuadSpec: depths and budgets must be >= 1");
  if (!(c_tail >= 1.0)) throw std::invalid_argument("QuadSpec: c_tail must be >= 1");
}

namespace detail {

const std::pair<std::vector<double>, std::vector<double>>& gauss_rule(int order) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  // Newton iteration on P_order from Chebyshev initial guesses.
  std::vector<double> nodes(order), weights(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(order, std::make_pair(std::move(nodes), std::move(weights)))
      .first->second;
}

namespace {

double ambient_radius(const ImmersionChart& chart, const AmbientVec& y0, const ParamVec& u) {
  return (chart.jet(u).position - y0).norm();
}

std::vector<double> axis_probes(double lo, double hi) {
  return {lo, lo + 0.25 * (hi - lo), 0.5 * (lo + hi), lo + 0.75 * (hi - lo), hi};
}

// Minimum ambient radius over a probe lattice of the slab {u_axis = t}.
double slab_min_radius(const ImmersionChart& chart, const AmbientVec& y0, int axis, double t,
                       const std::vector<std::pair<double, double>>& windows) {
  const int n = chart.dim();
  std::vector<std::vector<double>> probes(n);
  for (int a = 0; a < n; ++a)
    probes[a] = (a == axis) ? std::vector<double>{t}
                            : axis_probes(windows[a].first, windows[a].second);
  double best = kInf;
  std::vector<std::size_t> index(n, 0);
  while (true) {
    ParamVec u(n);
    for (int a = 0; a < n; ++a) u[a] = probes[a][index[a]];
    best = std::min(best, ambient_radius(chart, y0, u));
    int a = 0;
    for (; a < n; ++a) {
      if (++index[a] < probes[a].size()) break;
      index[a] = 0;
    }
    if (a == n) break;
  }
  return best;
}

}  // namespace

std::vector<std::pair<double, double>> chart_window_for_radius(const ImmersionChart& chart,
                                                               const AmbientVec& y0,
                                                               double radius) {
  const int n = chart.dim();
  std::vector<std::pair<double, double>> windows(n);
  for (int a = 0; a < n; ++a) {
    const AxisRange& axis = chart.domain[a];
    windows[a] = {std::isfinite(axis.lo) ? axis.lo : -1.0,
                  std::isfinite(axis.hi) ? axis.hi : 1.0};
  }

  // Two passes so each axis window is searched against refreshed neighbors.
  for (int pass = 0; pass < 2; ++pass) {
    for (int a = 0; a < n; ++a) {
      const AxisRange& axis = chart.domain[a];
      if (axis.periodic || axis.bounded()) continue;
      for (int dir : {+1, -1}) {
        const bool open = (dir > 0) ? !std::isfinite(axis.hi) : !std::isfinite(axis.lo);
        if (!open) continue;
        const double anchor = (dir > 0) ? std::max(0.0, std::isfinite(axis.lo) ? axis.lo : 0.0)
                                        : std::min(0.0, std::isfinite(axis.hi) ? axis.hi : 0.0);
        double step = 1.0;
        double inside_t = anchor;
        double outside_t = kInf;
        int clear_count = 0;
        for (int iter = 0; iter < 80; ++iter) {
          const double t = anchor + dir * step;
          if (slab_min_radius(chart, y0, a, t, windows) > radius) {
            if (++clear_count >= 2) {
              outside_t = t;
              break;
            }
          } else {
            clear_count = 0;
            inside_t = t;
          }
          step *= 2.0;
        }
        if (!std::isfinite(outside_t))
          throw QuadError("chart '" + chart.label +
                          "': cannot bracket the region of ambient radius <= " +
                          format_g(radius, 6) + " along axis " + std::to_string(a));
        for (int iter = 0; iter < 20; ++iter) {
          const double mid = 0.5 * (inside_t + outside_t);
          if (slab_min_radius(chart, y0, a, mid, windows) > radius)
            outside_t = mid;
          else
            inside_t = mid;
        }
        if (dir > 0)
          windows[a].second = outside_t;
        else
          windows[a].first = outside_t;
      }
    }
  }
  return windows;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Adaptive engine shared by huisken_direct and ball_volume
// ---------------------------------------------------------------------------

namespace {

using detail::gauss_rule;

constexpr int kClipSubsamples = 16;  // per axis, at the deepest straddle level

enum class CellState { Interior, Straddle, Outside };

struct Cell {
  int chart = 0;
  std::array<double, kMaxParamDim> lo{}, hi{};
  double value8 = 0.0;       // order-8 integral of the active integrand
  double value12 = 0.0;      // order-12 integral (kept as the value)
  double area12 = 0.0;       // order-12 integral of the bare area element
  double gl_err = 0.0;       // |value12 - value8|
  double uncertainty = 0.0;  // refinement priority / bound contribution
  CellState state = CellState::Interior;
  int depth = 0;
  int split_axis = 0;
  bool leaf = true;        // false once split
  bool splittable = true;  // false at depth caps and for outside cells
  double frac = 1.0;       // inside fraction (straddle cells, after attribution)
};

struct CellCmp {
  bool operator()(const std::pair<double, std::size_t>& a,
                  const std::pair<double, std::size_t>& b) const {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;  // older cells first on ties
  }
};

class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator(const Submanifold& M, const AmbientVec& y0, const QuadSpec& spec)
      : M_(M), y0_(y0), spec_(spec) {}

  void configure(bool weighted, double tau, double clip_r) {
    weighted_ = weighted;
    tau_ = tau;
    clip_r_ = clip_r;
    weight_norm_ = weighted ? std::pow(4.0 * M_PI * tau, -0.5 * M_.dim) : 1.0;
  }

  void run(const std::vector<std::vector<std::pair<double, double>>>& windows) {
    cells_.clear();
    while (!queue_.empty()) queue_.pop();
    build_roots(windows);

    int budget = spec_.max_subdivisions;
    while (budget > 0 && !queue_.empty()) {
      if (uncertainty_sum_ <= tolerance_target()) break;
      const auto [priority, index] = queue_.top();
      queue_.pop();
      if (!cells_[index].leaf || !cells_[index].splittable) continue;
      split(index);
      --budget;
    }
  }

  // Deterministic reduction in cell-creation order.
  double total_value() const {
    std::vector<double> parts;
    parts.reserve(cells_.size());
    for (const Cell& c : cells_) parts.push_back(c.leaf ? c.value12 * c.frac : 0.0);
    return pairwise_sum(parts);
  }

  double total_area() const {
    std::vector<double> parts;
    parts.reserve(cells_.size());
    for (const Cell& c : cells_) parts.push_back(c.leaf ? c.area12 * c.frac : 0.0);
    return pairwise_sum(parts);
  }

  // Final bound: GL discrepancy everywhere + clip-attribution residual.
  double total_bound() const {
    std::vector<double> parts;
    parts.reserve(cells_.size());
    for (const Cell& c : cells_) {
      if (!c.leaf) continue;
      double b = c.gl_err;
      if (c.state == CellState::Straddle) b += std::abs(c.value12) / kClipSubsamples;
      parts.push_back(b);
    }
    return pairwise_sum(parts);
  }

  // Attribute every remaining straddle leaf by subsample fraction.
  void finalize_clip() {
    if (clip_r_ <= 0.0) return;
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].leaf && cells_[i].state == CellState::Straddle) pending.push_back(i);
    parallel_for(static_cast<int>(pending.size()), [&](int k) {
      Cell& c = cells_[pending[k]];
      c.frac = subsample_fraction(c);
    });
  }

  bool reached_tolerance() const { return uncertainty_sum_ <= tolerance_target(); }

 private:
  double tolerance_target() const {
    return spec_.eps * std::max(std::abs(running_value_), 1e-300);
  }

  void build_roots(const std::vector<std::vector<std::pair<double, double>>>& windows) {
    running_value_ = 0.0;
    uncertainty_sum_ = 0.0;
    for (std::size_t chart = 0; chart < M_.charts.size(); ++chart) {
      const int n = M_.charts[chart].dim();
      const auto& win = windows[chart];
      std::vector<int> index(n, 0);
      while (true) {
        Cell cell;
        cell.chart = static_cast<int>(chart);
        bool empty = false;
        for (int a = 0; a < n; ++a) {
          const double lo = win[a].first, hi = win[a].second;
          const double w = (hi - lo) / spec_.init_cells;
          cell.lo[a] = lo + w * index[a];
          cell.hi[a] = lo + w * (index[a] + 1);
          if (!(cell.hi[a] > cell.lo[a])) empty = true;
        }
        if (!empty) add_cell(std::move(cell));
        int a = 0;
        for (; a < n; ++a) {
          if (++index[a] < spec_.init_cells) break;
          index[a] = 0;
        }
        if (a == n) break;
      }
    }
  }

  void add_cell(Cell cell) {
    evaluate(cell);
    running_value_ += value_estimate(cell);
    uncertainty_sum_ += cell.uncertainty;
    cells_.push_back(std::move(cell));
    const Cell& stored = cells_.back();
    if (stored.splittable && stored.uncertainty > 0.0)
      queue_.emplace(stored.uncertainty, cells_.size() - 1);
  }

  // Value estimate used while refining (straddle cells counted at half mass).
  static double value_estimate(const Cell& c) {
    if (c.state == CellState::Outside) return 0.0;
    if (c.state == CellState::Straddle) return 0.5 * c.value12;
    return c.value12;
  }

  void split(std::size_t index) {
    const Cell parent = cells_[index];  // copy: vector may reallocate
    cells_[index].leaf = false;
    running_value_ -= value_estimate(parent);
    uncertainty_sum_ -= parent.uncertainty;

    const int axis = parent.split_axis;
    const double mid = 0.5 * (parent.lo[axis] + parent.hi[axis]);
    for (int half = 0; half < 2; ++half) {
      Cell child;
      child.chart = parent.chart;
      child.lo = parent.lo;
      child.hi = parent.hi;
      if (half == 0)
        child.hi[axis] = mid;
      else
        child.lo[axis] = mid;
      child.depth = parent.depth + 1;
      add_cell(std::move(child));
    }
  }

  void evaluate(Cell& cell) {
    const ImmersionChart& chart = M_.charts[cell.chart];
    const int n = chart.dim();

    if (clip_r_ > 0.0) classify(cell, chart, n);
    if (cell.state == CellState::Outside) {
      cell.value8 = cell.value12 = cell.area12 = cell.gl_err = 0.0;
      cell.uncertainty = 0.0;
      cell.splittable = false;
      cell.frac = 0.0;
      return;
    }

    double a8 = 0.0;
    cell.value8 = tensor_integral(cell, chart, n, 8, a8);
    cell.value12 = tensor_integral(cell, chart, n, 12, cell.area12);
    cell.gl_err = std::abs(cell.value12 - cell.value8);

    if (cell.state == CellState::Straddle) {
      cell.frac = 1.0;  // provisional; finalize_clip computes the real fraction
      if (cell.depth >= spec_.clip_depth) {
        cell.splittable = false;
        cell.uncertainty = std::abs(cell.value12) / kClipSubsamples + cell.gl_err;
      } else {
        cell.splittable = true;
        cell.uncertainty = 0.5 * std::abs(cell.value12) + cell.gl_err;
      }
    } else {
      cell.frac = 1.0;
      cell.splittable = cell.depth < max_total_depth();
      cell.uncertainty = cell.gl_err;
    }

    choose_split_axis(cell, chart, n);
  }

  int max_total_depth() const { return spec_.clip_depth + 20; }

  // 3^n probe classification with a Jacobian-based safety margin.
  void classify(Cell& cell, const ImmersionChart& chart, int n) {
    double rad_min = kInf, rad_max = -kInf;
    double jac_norm = 0.0;
    ParamVec u(n);
    std::vector<int> index(n, 0);
    while (true) {
      for (int a = 0; a < n; ++a)
        u[a] = cell.lo[a] + 0.5 * index[a] * (cell.hi[a] - cell.lo[a]);
      const ChartJet jet = chart.jet(u);
      const double rad = (jet.position - y0_).norm();
      rad_min = std::min(rad_min, rad);
      rad_max = std::max(rad_max, rad);
      jac_norm = std::max(jac_norm, jet.jacobian.norm());
      int a = 0;
      for (; a < n; ++a) {
        if (++index[a] < 3) break;
        index[a] = 0;
      }
      if (a == n) break;
    }
    double half_diag2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double h = 0.5 * (cell.hi[a] - cell.lo[a]);
      half_diag2 += h * h;
    }
    const double reach = jac_norm * std::sqrt(half_diag2);
    if (rad_max + reach <= clip_r_)
      cell.state = CellState::Interior;
    else if (rad_min - reach > clip_r_)
      cell.state = CellState::Outside;
    else
      cell.state = CellState::Straddle;
  }

  // Straddle cells split along the axis with the largest radius variation;
  // interior cells along their longest edge.
  void choose_split_axis(Cell& cell, const ImmersionChart& chart, int n) {
    if (cell.state == CellState::Straddle && n > 1) {
      double best = -1.0;
      int best_axis = 0;
      ParamVec u(n);
      for (int a = 0; a < n; ++a) u[a] = 0.5 * (cell.lo[a] + cell.hi[a]);
      for (int a = 0; a < n; ++a) {
        ParamVec ulo = u, uhi = u;
        ulo[a] = cell.lo[a];
        uhi[a] = cell.hi[a];
        const double span =
            std::abs(radius_at(chart, uhi) - radius_at(chart, ulo));
        if (span > best) {
          best = span;
          best_axis = a;
        }
      }
      cell.split_axis = best_axis;
      return;
    }
    double best = -1.0;
    int best_axis = 0;
    for (int a = 0; a < n; ++a) {
      const double len = cell.hi[a] - cell.lo[a];
      if (len > best) {
        best = len;
        best_axis = a;
      }
    }
    cell.split_axis = best_axis;
  }

  double radius_at(const ImmersionChart& chart, const ParamVec& u) const {
    return (chart.jet(u).position - y0_).norm();
  }

  double integrand_weight(const AmbientVec& x) const {
    if (!weighted_) return 1.0;
    const double d2 = (x - y0_).squaredNorm();
    return weight_norm_ * std::exp(-d2 / (4.0 * tau_));
  }

  // Tensor-product Gauss-Legendre of the active integrand over the cell.
  // The order-12 pass also accumulates the bare area element.
  double tensor_integral(const Cell& cell, const ImmersionChart& chart, int n, int order,
                         double& area_out) {
    const auto& [nodes, weights] = gauss_rule(order);
    double scale = 1.0;
    for (int a = 0; a < n; ++a) scale *= 0.5 * (cell.hi[a] - cell.lo[a]);

    double sum = 0.0, area_sum = 0.0;
    ParamVec u(n);
    std::vector<int> index(n, 0);
    while (true) {
      double w = 1.0;
      for (int a = 0; a < n; ++a) {
        const double mid = 0.5 * (cell.lo[a] + cell.hi[a]);
        const double half = 0.5 * (cell.hi[a] - cell.lo[a]);
        u[a] = mid + half * nodes[index[a]];
        w *= weights[index[a]];
      }
      const ChartJet jet = chart.jet(u);
      const double density = gram_area_element(chart, u, jet);
      sum += w * density * integrand_weight(jet.position);
      area_sum += w * density;
      int a = 0;
      for (; a < n; ++a) {
        if (++index[a] < order) break;
        index[a] = 0;
      }
      if (a == n) break;
    }
    area_out = area_sum * scale;
    return sum * scale;
  }

  // Midpoint 16^n subsample: fraction of the cell inside the clip ball.
  double subsample_fraction(const Cell& cell) const {
    const ImmersionChart& chart = M_.charts[cell.chart];
    const int n = chart.dim();
    ParamVec u(n);
    std::vector<int> index(n, 0);
    long inside = 0, total = 0;
    while (true) {
      for (int a = 0; a < n; ++a) {
        const double w = (cell.hi[a] - cell.lo[a]) / kClipSubsamples;
        u[a] = cell.lo[a] + w * (index[a] + 0.5);
      }
      if ((chart.jet(u).position - y0_).norm() <= clip_r_) ++inside;
      ++total;
      int a = 0;
      for (; a < n; ++a) {
        if (++index[a] < kClipSubsamples) break;
        index[a] = 0;
      }
      if (a == n) break;
    }
    return static_cast<double>(inside) / static_cast<double>(total);
  }

  const Submanifold& M_;
  AmbientVec y0_;
  QuadSpec spec_;
  bool weighted_ = false;
  double tau_ = 1.0;
  double clip_r_ = 0.0;
  double weight_norm_ = 1.0;

  std::vector<Cell> cells_;
  std::priority_queue<std::pair<double, std::size_t>,
                      std::vector<std::pair<double, std::size_t>>, CellCmp>
      queue_;
  double running_value_ = 0.0;
  double uncertainty_sum_ = 0.0;
};

AmbientVec checked_center(const Submanifold& M, const AmbientVec& y0) {
  if (y0.size() != M.ambient_dim)
    throw std::invalid_argument("center dimension does not match the surface's ambient space");
  for (int i = 0; i < y0.size(); ++i)
    if (!std::isfinite(y0[i])) throw std::invalid_argument("center must have finite coordinates");
  return y0;
}

std::vector<std::vector<std::pair<double, double>>> all_windows(const Submanifold& M,
                                                                const AmbientVec& y0,
                                                                double radius) {
  std::vector<std::vector<std::pair<double, double>>> windows(M.charts.size());
  for (std::size_t c = 0; c < M.charts.size(); ++c)
    windows[c] = detail::chart_window_for_radius(M.charts[c], y0, radius);
  return windows;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

EntropyValue huisken_direct(const Submanifold& M, const AmbientVec& y0, double tau,
                            const QuadSpec& spec) {
  spec.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("huisken_direct: tau must be > 0");
  const AmbientVec center = checked_center(M, y0);
  const int n = M.dim;
  const double omega = unit_ball_volume(n);

  // Distance from the center to the nearest chart anchor; the R_cut offset.
  double offset = kInf;
  for (const ImmersionChart& chart : M.charts) {
    ParamVec anchor(chart.dim());
    for (int a = 0; a < chart.dim(); ++a) {
      const AxisRange& axis = chart.domain[a];
      if (axis.bounded())
        anchor[a] = 0.5 * (axis.lo + axis.hi);
      else if (std::isfinite(axis.lo))
        anchor[a] = axis.lo + 1.0;
      else if (std::isfinite(axis.hi))
        anchor[a] = axis.hi - 1.0;
      else
        anchor[a] = 0.0;
    }
    offset = std::min(offset, (chart.jet(anchor).position - center).norm());
  }

  AdaptiveIntegrator engine(M, center, spec);
  double eps_prime = std::min(spec.eps * 1e-2, 1e-8);
  EntropyValue result;
  result.tau = tau;
  for (int attempt = 0; attempt < 5; ++attempt) {
    const double r_cut = spec.c_tail * std::sqrt(4.0 * tau * std::log(1.0 / eps_prime)) + offset;
    engine.configure(/*weighted=*/true, tau, /*clip_r=*/0.0);
    engine.run(all_windows(M, center, r_cut));

    const double value = engine.total_value();
    const double gl_err = engine.total_bound();
    const double area = engine.total_area();
    // Largest density ratio seen, inflated x2, as the area-growth constant.
    const double ratio_sup = 2.0 * area / (omega * std::pow(r_cut, n));
    const double tail = ratio_sup * regularized_gamma_upper(0.5 * n, r_cut * r_cut / (4.0 * tau));

    result.value = value;
    result.bound_low = value - gl_err;
    result.bound_high = value + gl_err + tail;
    result.converged = engine.reached_tolerance() &&
                       (gl_err + tail) <= std::max(2.0 * spec.eps * std::abs(value), 1e-14);
    if (tail <= spec.eps * std::max(std::abs(value), 1e-300)) break;
    eps_prime *= 1e-3;
  }
  return result;
}

BallVolume ball_volume(const Submanifold& M, const AmbientVec& y0, double r,
                       const QuadSpec& spec) {
  spec.validate();
  if (!(r > 0.0)) throw std::invalid_argument("ball_volume: r must be > 0");
  const AmbientVec center = checked_center(M, y0);

  AdaptiveIntegrator engine(M, center, spec);
  engine.configure(/*weighted=*/false, 1.0, /*clip_r=*/r);
  engine.run(all_windows(M, center, r * 1.02 + 1e-9));
  engine.finalize_clip();

  BallVolume result;
  result.r = r;
  result.value = engine.total_value();
  result.bound = engine.total_bound();
  result.converged = engine.reached_tolerance() &&
                     result.bound <= std::max(2.0 * spec.eps * std::abs(result.value), 1e-12);
  return result;
}

}  // namespace mce
