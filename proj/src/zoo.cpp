#include "mce/zoo.hpp"

#include <cmath>
#include <memory>

#include "mce/expr.hpp"
#include "mce/special.hpp"
#include "mce/util.hpp"

namespace mce {

namespace {

using nlohmann::json;

double get_num(const json& params, const std::string& key, double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number()) throw BadSurfaceParams("param '" + key + "' must be a number");
  return params[key].get<double>();
}

int get_int(const json& params, const std::string& key, int fallback) {
  const double v = get_num(params, key, fallback);
  if (v != std::floor(v)) throw BadSurfaceParams("param '" + key + "' must be an integer");
  return static_cast<int>(v);
}

Submanifold single_chart_surface(ImmersionChart chart, bool minimal) {
  Submanifold M;
  M.dim = chart.dim();
  M.ambient_dim = chart.ambient_dim;
  M.declared_minimal = minimal;
  M.charts.push_back(std::move(chart));
  return M;
}

// ---- affine charts: X(u) = sum u_i e_i + offset --------------------------

ImmersionChart affine_chart(int n, int ambient, const std::vector<AmbientVec>& frame,
                            const AmbientVec& offset, const std::string& label) {
  ImmersionChart chart;
  chart.label = label;
  chart.domain.assign(n, AxisRange{});
  chart.ambient_dim = ambient;
  chart.jet = [n, ambient, frame, offset](const ParamVec& u) {
    ChartJet jet;
    jet.resize(ambient, n);
    jet.position = offset;
    for (int i = 0; i < n; ++i) {
      jet.position += u[i] * frame[i];
      jet.jacobian.col(i) = frame[i];
    }
    return jet;
  };
  return chart;
}

ZooEntry make_line() {
  AmbientVec e0(2);
  e0 << 1.0, 0.0;
  AmbientVec origin = AmbientVec::Zero(2);
  ZooEntry entry;
  entry.name = "line";
  entry.surface = single_chart_surface(affine_chart(1, 2, {e0}, origin, "line"), true);
  entry.is_cone = true;
  entry.closed_entropy = [](double) { return 1.0; };
  entry.closed_eavr = 1.0;
  entry.closed_volume = [](double r) { return 2.0 * r; };
  return entry;
}

ZooEntry make_k_lines(const json& params) {
  const int k = get_int(params, "k", 1);
  if (k < 1) throw BadSurfaceParams("k_lines: k must be >= 1");
  Submanifold M;
  M.dim = 1;
  M.ambient_dim = 2;
  M.declared_minimal = true;
  for (int j = 0; j < k; ++j) {
    const double theta = M_PI * j / k;
    AmbientVec dir(2);
    dir << std::cos(theta), std::sin(theta);
    M.charts.push_back(
        affine_chart(1, 2, {dir}, AmbientVec::Zero(2), "k_lines[" + std::to_string(j) + "]"));
  }
  ZooEntry entry;
  entry.name = "k_lines(k=" + std::to_string(k) + ")";
  entry.surface = std::move(M);
  entry.is_cone = true;
  entry.closed_entropy = [k](double) { return static_cast<double>(k); };
  entry.closed_eavr = k;
  entry.closed_volume = [k](double r) { return 2.0 * k * r; };
  return entry;
}

ZooEntry make_plane(const json& params) {
  const int n = get_int(params, "n", 2);
  const int ambient = get_int(params, "ambient", n + 1);
  if (n < 1 || n > kMaxParamDim) throw BadSurfaceParams("plane: n must be in [1, 3]");
  if (ambient <= n || ambient > kMaxAmbientDim)
    throw BadSurfaceParams("plane: need n < ambient <= 8");
  std::vector<AmbientVec> frame;
  for (int i = 0; i < n; ++i) {
    AmbientVec e = AmbientVec::Zero(ambient);
    e[i] = 1.0;
    frame.push_back(e);
  }
  ZooEntry entry;
  entry.name = "plane";
  entry.surface =
      single_chart_surface(affine_chart(n, ambient, frame, AmbientVec::Zero(ambient), "plane"), true);
  entry.is_cone = true;
  entry.closed_entropy = [](double) { return 1.0; };
  entry.closed_eavr = 1.0;
  entry.closed_volume = [n](double r) { return unit_ball_volume(n) * std::pow(r, n); };
  return entry;
}

ZooEntry make_offset_plane(const json& params) {
  const double d = get_num(params, "d", 1.0);
  if (d < 0.0) throw BadSurfaceParams("offset_plane: offset d must be >= 0");
  const int n = get_int(params, "n", 2);
  const int ambient = get_int(params, "ambient", n + 1);
  if (n < 1 || n > kMaxParamDim) throw BadSurfaceParams("offset_plane: n must be in [1, 3]");
  if (ambient <= n || ambient > kMaxAmbientDim)
    throw BadSurfaceParams("offset_plane: need n < ambient <= 8");
  std::vector<AmbientVec> frame;
  for (int i = 0; i < n; ++i) {
    AmbientVec e = AmbientVec::Zero(ambient);
    e[i] = 1.0;
    frame.push_back(e);
  }
  AmbientVec offset = AmbientVec::Zero(ambient);
  offset[ambient - 1] = d;
  ZooEntry entry;
  entry.name = "offset_plane(d=" + format_g(d, 6) + ")";
  entry.surface =
      single_chart_surface(affine_chart(n, ambient, frame, offset, entry.name), true);
  entry.is_cone = (d == 0.0);
  entry.closed_entropy = [d](double tau) { return std::exp(-d * d / (4.0 * tau)); };
  entry.closed_eavr = 1.0;
  entry.closed_volume = [n, d](double r) {
    if (r <= d) return 0.0;
    return unit_ball_volume(n) * std::pow(r * r - d * d, n / 2.0);
  };
  return entry;
}

ZooEntry make_k_planes(const json& params) {
  const int k = get_int(params, "k", 1);
  if (k < 1) throw BadSurfaceParams("k_planes: k must be >= 1");
  Submanifold M;
  M.dim = 2;
  M.ambient_dim = 3;
  M.declared_minimal = true;
  for (int j = 0; j < k; ++j) {
    const double theta = M_PI * j / k;  // rotate about the x-axis
    AmbientVec e1(3), e2(3);
    e1 << 1.0, 0.0, 0.0;
    e2 << 0.0, std::cos(theta), std::sin(theta);
    M.charts.push_back(
        affine_chart(2, 3, {e1, e2}, AmbientVec::Zero(3), "k_planes[" + std::to_string(j) + "]"));
  }
  ZooEntry entry;
  entry.name = "k_planes(k=" + std::to_string(k) + ")";
  entry.surface = std::move(M);
  entry.is_cone = true;
  entry.closed_entropy = [k](double) { return static_cast<double>(k); };
  entry.closed_eavr = k;
  entry.closed_volume = [k](double r) { return k * M_PI * r * r; };
  return entry;
}

// ---- cone over a spherical link ------------------------------------------

// Chart X(rho, s) = rho * gamma(s) for a curve gamma on S^(ambient-1).
// The link jet supplies gamma, gamma', gamma''.
ImmersionChart cone_chart(std::function<void(double, AmbientVec&, AmbientVec&, AmbientVec&)> link,
                          double s_lo, double s_hi, int ambient, const std::string& label) {
  ImmersionChart chart;
  chart.label = label;
  chart.domain = {AxisRange{0.0, kInf, false}, AxisRange{s_lo, s_hi, false}};
  chart.ambient_dim = ambient;
  chart.jet = [link, ambient](const ParamVec& u) {
    const double rho = u[0], s = u[1];
    AmbientVec g(ambient), gp(ambient), gpp(ambient);
    link(s, g, gp, gpp);
    ChartJet jet;
    jet.resize(ambient, 2);
    jet.position = rho * g;
    jet.jacobian.col(0) = g;
    jet.jacobian.col(1) = rho * gp;
    for (int a = 0; a < ambient; ++a) {
      jet.hess(a, 0, 0) = 0.0;
      jet.hess(a, 0, 1) = gp[a];
      jet.hess(a, 1, 0) = gp[a];
      jet.hess(a, 1, 1) = rho * gpp[a];
    }
    return jet;
  };
  return chart;
}

ZooEntry make_cone_over_link(const json& params) {
  ZooEntry entry;
  entry.is_cone = true;

  if (params.contains("link_exprs")) {
    // Parametric link: a curve expression with one variable, unit norm.
    if (!params.contains("link_domain"))
      throw BadSurfaceParams("cone_over_link: link_exprs requires link_domain [[lo,hi]]");
    const auto& dom = params["link_domain"];
    if (!dom.is_array() || dom.size() != 1 || !dom[0].is_array() || dom[0].size() != 2)
      throw BadSurfaceParams("cone_over_link: link_domain must be [[lo,hi]]");
    const double s_lo = dom[0][0].get<double>(), s_hi = dom[0][1].get<double>();
    if (!(s_lo < s_hi) || !std::isfinite(s_lo) || !std::isfinite(s_hi))
      throw BadSurfaceParams("cone_over_link: link domain must be a finite interval");
    const std::string source = params["link_exprs"].get<std::string>();
    const int ambient = get_int(params, "ambient", 3);
    auto asts = parse_immersion(source, 1, ambient);
    auto shared = std::make_shared<const std::vector<ExprAst>>(std::move(asts));

    // Unit-norm check on a deterministic grid.
    for (int i = 0; i <= 64; ++i) {
      ParamVec s(1);
      s[0] = s_lo + (s_hi - s_lo) * i / 64.0;
      double norm2 = 0.0;
      for (const auto& ast : *shared) {
        const double v = eval_jet2(ast, s).value;
        norm2 += v * v;
      }
      if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10)
        throw BadSurfaceParams("cone_over_link: link image must lie on the unit sphere (|gamma("
                               + format_g(s[0], 6) + ")| deviates by more than 1e-10)");
    }

    auto link = [shared, ambient](double s, AmbientVec& g, AmbientVec& gp, AmbientVec& gpp) {
      ParamVec u(1);
      u[0] = s;
      g.resize(ambient);
      gp.resize(ambient);
      gpp.resize(ambient);
      for (int a = 0; a < ambient; ++a) {
        const Jet2 j = eval_jet2((*shared)[a], u);
        g[a] = j.value;
        gp[a] = j.grad[0];
        gpp[a] = j.hess(0, 0);
      }
    };

    // Link length by composite Gauss-Legendre (fixed 64 panels, order 8).
    double length = 0.0;
    {
      const int panels = 64;
      const double nodes[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                               0.9602898564975363};
      const double weights[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
      for (int p = 0; p < panels; ++p) {
        const double a = s_lo + (s_hi - s_lo) * p / panels;
        const double b = s_lo + (s_hi - s_lo) * (p + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < 4; ++q) {
          for (double sign : {-1.0, 1.0}) {
            AmbientVec g, gp, gpp;
            link(mid + sign * half * nodes[q], g, gp, gpp);
            length += weights[q] * half * gp.norm();
          }
        }
      }
    }

    entry.name = "cone_over_link(parametric)";
    Submanifold M;
    M.dim = 2;
    M.ambient_dim = ambient;
    M.declared_minimal = false;  // minimal only for geodesic links; left to check_minimality
    M.charts.push_back(cone_chart(link, s_lo, s_hi, ambient, entry.name));
    entry.surface = std::move(M);
    const double L = length;
    entry.closed_entropy = [L](double) { return L / (2.0 * M_PI); };
    entry.closed_eavr = L / (2.0 * M_PI);
    entry.closed_volume = [L](double r) { return 0.5 * L * r * r; };
    return entry;
  }

  const double L = get_num(params, "link_length", 2.0 * M_PI);
  if (!(L > 0.0)) throw BadSurfaceParams("cone_over_link: link_length must be > 0");

  // Split the requested length into <= 2 pi arcs on distinct great circles
  // (rotated about the x-axis) so charts overlap only in measure zero.
  const int arcs = std::max(1, static_cast<int>(std::ceil(L / (2.0 * M_PI) - 1e-12)));
  const double arc_len = L / arcs;
  Submanifold M;
  M.dim = 2;
  M.ambient_dim = 3;
  M.declared_minimal = true;  // great-circle cones are planar sectors
  for (int j = 0; j < arcs; ++j) {
    const double phi = (arcs > 1) ? M_PI * j / (2.0 * arcs) : 0.0;
    const double cp = std::cos(phi), sp = std::sin(phi);
    auto link = [cp, sp](double s, AmbientVec& g, AmbientVec& gp, AmbientVec& gpp) {
      g.resize(3);
      gp.resize(3);
      gpp.resize(3);
      const double cs = std::cos(s), ss = std::sin(s);
      g << cs, ss * cp, ss * sp;
      gp << -ss, cs * cp, cs * sp;
      gpp << -cs, -ss * cp, -ss * sp;
    };
    M.charts.push_back(cone_chart(link, 0.0, arc_len, 3,
                                  "cone_over_link[" + std::to_string(j) + "]"));
  }
  entry.name = "cone_over_link(L=" + format_g(L, 9) + ")";
  entry.surface = std::move(M);
  entry.closed_entropy = [L](double) { return L / (2.0 * M_PI); };
  entry.closed_eavr = L / (2.0 * M_PI);
  entry.closed_volume = [L](double r) { return 0.5 * L * r * r; };
  return entry;
}

// ---- classic minimal surfaces --------------------------------------------

ZooEntry make_catenoid() {
  ImmersionChart chart;
  chart.label = "catenoid";
  chart.domain = {AxisRange{0.0, 2.0 * M_PI, true}, AxisRange{}};
  chart.ambient_dim = 3;
  chart.jet = [](const ParamVec& u) {
    const double cu = std::cos(u[0]), su = std::sin(u[0]);
    const double cv = std::cosh(u[1]), sv = std::sinh(u[1]);
    ChartJet jet;
    jet.resize(3, 2);
    jet.position << cv * cu, cv * su, u[1];
    jet.jacobian.col(0) << -cv * su, cv * cu, 0.0;
    jet.jacobian.col(1) << sv * cu, sv * su, 1.0;
    // d2/du2, d2/dudv, d2/dv2 per coordinate
    jet.hess(0, 0, 0) = -cv * cu;
    jet.hess(0, 0, 1) = jet.hess(0, 1, 0) = -sv * su;
    jet.hess(0, 1, 1) = cv * cu;
    jet.hess(1, 0, 0) = -cv * su;
    jet.hess(1, 0, 1) = jet.hess(1, 1, 0) = sv * cu;
    jet.hess(1, 1, 1) = cv * su;
    return jet;
  };
  ZooEntry entry;
  entry.name = "catenoid";
  entry.surface = single_chart_surface(std::move(chart), true);
  return entry;
}

ZooEntry make_helicoid() {
  ImmersionChart chart;
  chart.label = "helicoid";
  chart.domain = {AxisRange{}, AxisRange{}};
  chart.ambient_dim = 3;
  chart.jet = [](const ParamVec& p) {
    const double u = p[0];
    const double cv = std::cos(p[1]), sv = std::sin(p[1]);
    ChartJet jet;
    jet.resize(3, 2);
    jet.position << u * cv, u * sv, p[1];
    jet.jacobian.col(0) << cv, sv, 0.0;
    jet.jacobian.col(1) << -u * sv, u * cv, 1.0;
    jet.hess(0, 0, 1) = jet.hess(0, 1, 0) = -sv;
    jet.hess(0, 1, 1) = -u * cv;
    jet.hess(1, 0, 1) = jet.hess(1, 1, 0) = cv;
    jet.hess(1, 1, 1) = -u * sv;
    return jet;
  };
  ZooEntry entry;
  entry.name = "helicoid";
  entry.surface = single_chart_surface(std::move(chart), true);
  return entry;
}

ZooEntry make_enneper() {
  ImmersionChart chart;
  chart.label = "enneper";
  chart.domain = {AxisRange{}, AxisRange{}};
  chart.ambient_dim = 3;
  chart.jet = [](const ParamVec& p) {
    const double u = p[0], v = p[1];
    ChartJet jet;
    jet.resize(3, 2);
    jet.position << u - u * u * u / 3.0 + u * v * v, v - v * v * v / 3.0 + u * u * v,
        u * u - v * v;
    jet.jacobian.col(0) << 1.0 - u * u + v * v, 2.0 * u * v, 2.0 * u;
    jet.jacobian.col(1) << 2.0 * u * v, 1.0 - v * v + u * u, -2.0 * v;
    jet.hess(0, 0, 0) = -2.0 * u;
    jet.hess(0, 0, 1) = jet.hess(0, 1, 0) = 2.0 * v;
    jet.hess(0, 1, 1) = 2.0 * u;
    jet.hess(1, 0, 0) = 2.0 * v;
    jet.hess(1, 0, 1) = jet.hess(1, 1, 0) = 2.0 * u;
    jet.hess(1, 1, 1) = -2.0 * v;
    jet.hess(2, 0, 0) = 2.0;
    jet.hess(2, 1, 1) = -2.0;
    return jet;
  };
  ZooEntry entry;
  entry.name = "enneper";
  entry.surface = single_chart_surface(std::move(chart), true);
  return entry;
}

// Unit sphere through the origin (center (0,0,1)); the non-minimal control.
// f(r) = pi r^2 up to r = 2 (its diameter), constant afterwards.
ZooEntry make_sphere() {
  constexpr double pole_gap = 1e-4;
  ImmersionChart chart;
  chart.label = "sphere";
  chart.domain = {AxisRange{pole_gap, M_PI - pole_gap, false}, AxisRange{0.0, 2.0 * M_PI, true}};
  chart.ambient_dim = 3;
  chart.jet = [](const ParamVec& p) {
    const double ct = std::cos(p[0]), st = std::sin(p[0]);
    const double cf = std::cos(p[1]), sf = std::sin(p[1]);
    ChartJet jet;
    jet.resize(3, 2);
    jet.position << st * cf, st * sf, 1.0 - ct;
    jet.jacobian.col(0) << ct * cf, ct * sf, st;
    jet.jacobian.col(1) << -st * sf, st * cf, 0.0;
    jet.hess(0, 0, 0) = -st * cf;
    jet.hess(0, 0, 1) = jet.hess(0, 1, 0) = -ct * sf;
    jet.hess(0, 1, 1) = -st * cf;
    jet.hess(1, 0, 0) = -st * sf;
    jet.hess(1, 0, 1) = jet.hess(1, 1, 0) = ct * cf;
    jet.hess(1, 1, 1) = -st * sf;
    jet.hess(2, 0, 0) = ct;
    return jet;
  };
  ZooEntry entry;
  entry.name = "sphere";
  entry.surface = single_chart_surface(std::move(chart), false);
  return entry;
}

ZooEntry make_expr_surface(const json& spec) {
  for (const char* key : {"exprs", "n", "ambient", "domain"})
    if (!spec.contains(key))
      throw BadSurfaceParams(std::string("expr surface requires field '") + key + "'");
  const int n = spec["n"].get<int>();
  const int ambient = spec["ambient"].get<int>();
  const std::string source = spec["exprs"].get<std::string>();
  const auto& dom = spec["domain"];
  if (!dom.is_array() || static_cast<int>(dom.size()) != n)
    throw BadSurfaceParams("expr surface: domain must list one [lo,hi] pair per variable");

  std::vector<AxisRange> domain;
  for (const auto& pair : dom) {
    if (!pair.is_array() || pair.size() != 2)
      throw BadSurfaceParams("expr surface: each domain entry must be [lo,hi] (null = unbounded)");
    AxisRange axis;
    axis.lo = pair[0].is_null() ? -kInf : pair[0].get<double>();
    axis.hi = pair[1].is_null() ? kInf : pair[1].get<double>();
    if (!(axis.lo < axis.hi))
      throw BadSurfaceParams("expr surface: domain requires lo < hi");
    domain.push_back(axis);
  }

  auto asts = parse_immersion(source, n, ambient);
  ZooEntry entry;
  entry.name = "expr";
  entry.surface = single_chart_surface(
      chart_from_expressions(std::move(asts), std::move(domain), "expr"), false);
  return entry;
}

}  // namespace

const std::vector<std::string>& surface_names() {
  static const std::vector<std::string> names = {
      "line",     "k_lines",  "plane",    "offset_plane", "k_planes", "cone_over_link",
      "catenoid", "helicoid", "enneper",  "sphere",       "expr"};
  return names;
}

ZooEntry make_surface(const std::string& name, const json& params) {
  if (name == "line") return make_line();
  if (name == "k_lines") return make_k_lines(params);
  if (name == "plane") return make_plane(params);
  if (name == "offset_plane") return make_offset_plane(params);
  if (name == "k_planes") return make_k_planes(params);
  if (name == "cone_over_link") return make_cone_over_link(params);
  if (name == "catenoid") return make_catenoid();
  if (name == "helicoid") return make_helicoid();
  if (name == "enneper") return make_enneper();
  if (name == "sphere") return make_sphere();
  if (name == "expr") return make_expr_surface(params);
  throw UnknownSurfaceError("unknown surface '" + name + "'");
}

ZooEntry make_surface_from_spec(const json& doc) {
  if (!doc.is_object() || !doc.contains("name"))
    throw BadSurfaceParams("surface spec must be an object with a 'name' field");
  const std::string name = doc["name"].get<std::string>();
  if (name == "expr") return make_expr_surface(doc);
  return make_surface(name, doc.contains("params") ? doc["params"] : json::object());
}

}  // namespace mce
