#include "mce/cli_support.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mce/expr.hpp"
#include "mce/profile.hpp"
#include "mce/util.hpp"
#include "mce/verify.hpp"

namespace mce {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> GridSpec::materialize() const { return make_grid(log, lo, hi, count); }

std::string GridSpec::str() const {
  return std::string(log ? "log" : "lin") + ":" + format_g17(lo) + ":" + format_g17(hi) + ":" +
         std::to_string(count);
}

GridSpec parse_grid_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4)
    throw std::invalid_argument("grid spec must be {lin|log}:lo:hi:count, got '" + text + "'");
  GridSpec g;
  if (parts[0] == "log")
    g.log = true;
  else if (parts[0] == "lin")
    g.log = false;
  else
    throw std::invalid_argument("grid spec must start with lin or log, got '" + parts[0] + "'");
  try {
    g.lo = std::stod(parts[1]);
    g.hi = std::stod(parts[2]);
    g.count = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed grid spec '" + text + "'");
  }
  if (!(g.lo < g.hi)) throw std::invalid_argument("grid spec requires lo < hi");
  if (g.count < 2) throw std::invalid_argument("grid spec requires count >= 2");
  if (g.log && !(g.lo > 0.0)) throw std::invalid_argument("log grid requires lo > 0");
  return g;
}

QuadSpec RunConfig::quad_spec() const {
  QuadSpec spec;
  spec.eps = eps;
  return spec;
}

std::string RunConfig::canonical() const {
  ordered_json doc;
  doc["command"] = command;
  doc["surface"] = surface_doc;
  doc["center"] = center;
  doc["tau"] = format_g17(tau);
  doc["tau_grid"] = tau_grid.str();
  doc["r_grid"] = r_grid.str();
  doc["eps"] = format_g17(eps);
  doc["format"] = format;
  doc["seed"] = seed;
  return doc.dump();
}

json surface_doc_from_flag(const std::string& flag) {
  if (flag.empty()) throw std::invalid_argument("--surface must not be empty");
  if (flag.front() == '{') {
    json doc = json::parse(flag, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded())
      throw std::invalid_argument("--surface: malformed inline JSON");
    return doc;
  }
  if (flag.front() == '@') {
    std::ifstream in(flag.substr(1));
    if (!in) throw std::invalid_argument("--surface: cannot open file '" + flag.substr(1) + "'");
    json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded())
      throw std::invalid_argument("--surface: malformed JSON in '" + flag.substr(1) + "'");
    return doc;
  }
  json doc;
  doc["name"] = flag;
  doc["params"] = json::object();
  return doc;
}

std::vector<double> parse_center(const std::string& text) {
  std::vector<double> coords;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      coords.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("--center: malformed coordinate '" + item + "'");
    }
  }
  if (coords.empty()) throw std::invalid_argument("--center: no coordinates given");
  return coords;
}

std::string config_hash_hex(const RunConfig& cfg) {
  const std::uint64_t h = fnv1a64(cfg.canonical());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string provenance_comment(const RunConfig& cfg) {
  return std::string("mce ") + kVersion + " " + cfg.command + " " + config_hash_hex(cfg);
}

// ---------------------------------------------------------------------------
// SVG plot
// ---------------------------------------------------------------------------

std::string svg_entropy_plot(const std::vector<EntropyValue>& curve, const std::string& title) {
  constexpr double W = 800, H = 500, ML = 70, MR = 25, MT = 40, MB = 55;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
        "viewBox=\"0 0 800 500\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  if (curve.size() >= 2) {
    double xlo = std::log10(curve.front().tau), xhi = std::log10(curve.back().tau);
    double ylo = curve.front().bound_low, yhi = curve.front().bound_high;
    for (const EntropyValue& ev : curve) {
      ylo = std::min(ylo, ev.bound_low);
      yhi = std::max(yhi, ev.value);
    }
    if (!(yhi > ylo)) yhi = ylo + 1.0;
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
    auto px = [&](double t) { return ML + (std::log10(t) - xlo) / (xhi - xlo) * (W - ML - MR); };
    auto py = [&](double v) { return H - MB - (v - ylo) / (yhi - ylo) * (H - MT - MB); };

    // Decade gridlines.
    for (int d = static_cast<int>(std::ceil(xlo)); d <= static_cast<int>(std::floor(xhi)); ++d) {
      const double x = ML + (d - xlo) / (xhi - xlo) * (W - ML - MR);
      os << "<line x1=\"" << format_g(x, 6) << "\" y1=\"" << MT << "\" x2=\"" << format_g(x, 6)
         << "\" y2=\"" << (H - MB) << "\" stroke=\"#dddddd\"/>\n";
      os << "<text x=\"" << format_g(x, 6) << "\" y=\"" << (H - MB + 18)
         << "\" font-size=\"12\" text-anchor=\"middle\">1e" << d << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
      const double v = ylo + (yhi - ylo) * i / 4;
      const double y = py(v);
      os << "<line x1=\"" << ML << "\" y1=\"" << format_g(y, 6) << "\" x2=\"" << (W - MR)
         << "\" y2=\"" << format_g(y, 6) << "\" stroke=\"#eeeeee\"/>\n";
      os << "<text x=\"" << (ML - 8) << "\" y=\"" << format_g(y + 4, 6)
         << "\" font-size=\"12\" text-anchor=\"end\">" << format_g(v, 4) << "</text>\n";
    }

    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const EntropyValue& ev : curve)
      os << format_g(px(ev.tau), 6) << "," << format_g(py(ev.value), 6) << " ";
    os << "\"/>\n";
  }
  os << "<text x=\"" << (W / 2) << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" << title
     << "</text>\n";
  os << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 12)
     << "\" font-size=\"13\" text-anchor=\"middle\">tau (log scale)</text>\n";
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace {

AmbientVec resolve_center(const RunConfig& cfg, int ambient_dim) {
  AmbientVec y0 = AmbientVec::Zero(ambient_dim);
  if (cfg.center.empty()) return y0;
  if (static_cast<int>(cfg.center.size()) != ambient_dim)
    throw std::invalid_argument("--center has " + std::to_string(cfg.center.size()) +
                                " coordinates but the surface lives in R^" +
                                std::to_string(ambient_dim));
  for (int i = 0; i < ambient_dim; ++i) y0[i] = cfg.center[i];
  return y0;
}

// Writes `text` to cfg.out_path, or to `fallback` when no path was given.
void emit(const RunConfig& cfg, const std::string& text, std::ostream& fallback) {
  if (cfg.out_path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file '" + cfg.out_path + "'");
  out << text;
}

std::string entropy_json_line(const EntropyValue& ev) {
  ordered_json doc;
  doc["tau"] = ev.tau;
  doc["value"] = ev.value;
  doc["bound"] = ev.error_bound();
  doc["converged"] = ev.converged;
  return doc.dump();
}

}  // namespace

int run_entropy(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ZooEntry entry = make_surface_from_spec(cfg.surface_doc);
  const AmbientVec y0 = resolve_center(cfg, entry.surface.ambient_dim);
  const EntropyValue ev = huisken_direct(entry.surface, y0, cfg.tau, cfg.quad_spec());
  emit(cfg, entropy_json_line(ev) + "\n", out);
  return ev.converged ? kExitOk : kExitUnconverged;
}

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ZooEntry entry = make_surface_from_spec(cfg.surface_doc);
  const AmbientVec y0 = resolve_center(cfg, entry.surface.ambient_dim);
  const RadialProfile profile =
      build_profile(entry.surface, y0, cfg.r_grid.materialize(), cfg.quad_spec());
  const std::vector<EntropyValue> curve = entropy_curve(profile, cfg.tau_grid.materialize());

  std::ostringstream csv;
  curve_to_csv(curve, csv, provenance_comment(cfg));
  emit(cfg, csv.str(), out);

  if (!cfg.plot_path.empty()) {
    std::ofstream svg(cfg.plot_path, std::ios::binary);
    if (!svg) throw std::invalid_argument("cannot open plot file '" + cfg.plot_path + "'");
    svg << svg_entropy_plot(curve, cfg.command + " " + entry.name);
  }

  for (const EntropyValue& ev : curve)
    if (!ev.converged) return kExitUnconverged;
  return kExitOk;
}

int run_eavr(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ZooEntry entry = make_surface_from_spec(cfg.surface_doc);
  const AmbientVec y0 = resolve_center(cfg, entry.surface.ambient_dim);
  const RadialProfile profile =
      build_profile(entry.surface, y0, cfg.r_grid.materialize(), cfg.quad_spec());
  const EavrEstimate est = eavr_estimate(profile);
  const double omega = unit_ball_volume(profile.dim);

  ordered_json summary;
  summary["value"] = est.value;
  ordered_json bracket = ordered_json::array();
  bracket.push_back(est.low);
  if (std::isfinite(est.high))
    bracket.push_back(est.high);
  else
    bracket.push_back(nullptr);  // diverging upper estimate
  summary["bracket"] = bracket;
  summary["converged"] = est.converged;

  if (cfg.format == "json" && cfg.out_path.empty()) {
    out << summary.dump() << "\n";
    return kExitOk;
  }

  std::ostringstream csv;
  csv << "# " << provenance_comment(cfg) << "\n";
  csv << "r,volume,ratio,bound\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double ratio = profile.volume[i] / (omega * std::pow(profile.r[i], profile.dim));
    csv << format_g17(profile.r[i]) << "," << format_g17(profile.volume[i]) << ","
        << format_g17(ratio) << "," << format_g17(profile.bound[i]) << "\n";
  }
  csv << "# " << summary.dump() << "\n";
  emit(cfg, csv.str(), out);
  if (!cfg.out_path.empty()) out << summary.dump() << "\n";
  return kExitOk;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ZooEntry entry = make_surface_from_spec(cfg.surface_doc);
  const AmbientVec y0 = resolve_center(cfg, entry.surface.ambient_dim);
  VerifyGrids grids{cfg.r_grid.materialize(), cfg.tau_grid.materialize()};
  const VerificationReport report = run_suite(entry, y0, grids, cfg.quad_spec(), cfg.seed);
  emit(cfg, report.to_json().dump(2) + "\n", out);
  return report.all_passed() ? kExitOk : kExitVerifyFailed;
}

int run_blowdown(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ZooEntry entry = make_surface_from_spec(cfg.surface_doc);
  const AmbientVec y0 = resolve_center(cfg, entry.surface.ambient_dim);
  const RadialProfile profile =
      build_profile(entry.surface, y0, cfg.r_grid.materialize(), cfg.quad_spec());

  std::ostringstream csv;
  csv << "# " << provenance_comment(cfg) << "\n";
  csv << "r_j,normalized_volume,shell_ratio\n";
  for (double r : profile.r) {
    const BlowdownPoint bp = blowdown(profile, r);
    csv << format_g17(bp.r) << "," << format_g17(bp.normalized_volume) << ","
        << format_g17(bp.shell_ratio) << "\n";
  }
  emit(cfg, csv.str(), out);
  return kExitOk;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "entropy") return run_entropy(cfg, out, err);
    if (cfg.command == "sweep") return run_sweep(cfg, out, err);
    if (cfg.command == "eavr") return run_eavr(cfg, out, err);
    if (cfg.command == "verify") return run_verify(cfg, out, err);
    if (cfg.command == "blowdown") return run_blowdown(cfg, out, err);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << " at bytes " << e.span.begin << ".." << e.span.end << "\n";
    // Caret diagnostics against the expression source, when recoverable.
    if (cfg.surface_doc.is_object() && cfg.surface_doc.contains("exprs") &&
        cfg.surface_doc["exprs"].is_string()) {
      const std::string src = cfg.surface_doc["exprs"].get<std::string>();
      if (e.span.begin >= 0 && e.span.begin <= static_cast<int>(src.size())) {
        err << "  " << src << "\n  " << std::string(e.span.begin, ' ') << "^\n";
      }
    }
    return kExitUsage;
  } catch (const EvalDomainError& e) {
    err << "error: " << e.what() << " at bytes " << e.span.begin << ".." << e.span.end << "\n";
    return kExitUsage;
  } catch (const QuadError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnconverged;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace mce
