// mce — Gaussian-weighted area functionals and asymptotic volume ratios on
// minimal submanifolds of Euclidean space.

#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mce/cli_support.hpp"

namespace {

struct RawFlags {
  std::string surface, center, tau_grid, r_grid, format, out, plot, config;
  double tau = 0.0, eps = 0.0;
  std::uint64_t seed = 0;
};

// Applies config-file values beneath any flags the user actually set.
void apply_config_file(mce::RunConfig& cfg, const std::string& path,
                       const std::set<std::string>& set_flags) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object())
    throw std::invalid_argument("config file must hold a single JSON object");

  auto unset = [&](const char* name) { return set_flags.find(name) == set_flags.end(); };
  if (doc.contains("surface") && unset("surface")) {
    if (doc["surface"].is_string())
      cfg.surface_doc = mce::surface_doc_from_flag(doc["surface"].get<std::string>());
    else
      cfg.surface_doc = doc["surface"];
  }
  if (doc.contains("center") && unset("center"))
    cfg.center = doc["center"].get<std::vector<double>>();
  if (doc.contains("tau") && unset("tau")) cfg.tau = doc["tau"].get<double>();
  if (doc.contains("tau_grid") && unset("tau-grid"))
    cfg.tau_grid = mce::parse_grid_spec(doc["tau_grid"].get<std::string>());
  if (doc.contains("r_grid") && unset("r-grid"))
    cfg.r_grid = mce::parse_grid_spec(doc["r_grid"].get<std::string>());
  if (doc.contains("eps") && unset("eps")) cfg.eps = doc["eps"].get<double>();
  if (doc.contains("format") && unset("format")) cfg.format = doc["format"].get<std::string>();
  if (doc.contains("out") && unset("out")) cfg.out_path = doc["out"].get<std::string>();
  if (doc.contains("plot") && unset("plot")) cfg.plot_path = doc["plot"].get<std::string>();
  if (doc.contains("seed") && unset("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-weighted area functionals and extrinsic asymptotic volume "
               "ratios on minimal submanifolds"};
  app.require_subcommand(1);

  RawFlags raw;
  std::vector<CLI::App*> subs;
  for (const char* name : {"entropy", "sweep", "eavr", "verify", "blowdown"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--surface", raw.surface, "zoo name, inline JSON, or @file");
    sub->add_option("--center", raw.center, "center y0 as comma-separated coordinates");
    sub->add_option("--tau", raw.tau, "Gaussian scale tau (entropy command)");
    sub->add_option("--tau-grid", raw.tau_grid, "{lin|log}:lo:hi:count");
    sub->add_option("--r-grid", raw.r_grid, "{lin|log}:lo:hi:count");
    sub->add_option("--eps", raw.eps, "target relative quadrature error");
    sub->add_option("--out", raw.out, "output path (default stdout)");
    sub->add_option("--format", raw.format, "csv|json");
    sub->add_option("--plot", raw.plot, "SVG output path (sweep)");
    sub->add_option("--seed", raw.seed, "seed for low-discrepancy sampling offsets");
    sub->add_option("--config", raw.config, "JSON config file (flags take precedence)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mce::kExitUsage;
  }

  CLI::App* active = nullptr;
  for (CLI::App* sub : subs)
    if (sub->parsed()) active = sub;

  mce::RunConfig cfg;
  cfg.command = active->get_name();

  std::set<std::string> set_flags;
  for (const char* name :
       {"surface", "center", "tau", "tau-grid", "r-grid", "eps", "out", "format", "plot", "seed"})
    if (active->count(std::string("--") + name) > 0) set_flags.insert(name);

  try {
    // Defaults, then config file, then flags.
    if (!raw.config.empty()) apply_config_file(cfg, raw.config, set_flags);
    if (set_flags.count("surface")) cfg.surface_doc = mce::surface_doc_from_flag(raw.surface);
    if (set_flags.count("center")) cfg.center = mce::parse_center(raw.center);
    if (set_flags.count("tau")) cfg.tau = raw.tau;
    if (set_flags.count("tau-grid")) cfg.tau_grid = mce::parse_grid_spec(raw.tau_grid);
    if (set_flags.count("r-grid")) cfg.r_grid = mce::parse_grid_spec(raw.r_grid);
    if (set_flags.count("eps")) cfg.eps = raw.eps;
    if (set_flags.count("out")) cfg.out_path = raw.out;
    if (set_flags.count("format")) cfg.format = raw.format;
    if (set_flags.count("plot")) cfg.plot_path = raw.plot;
    if (set_flags.count("seed")) cfg.seed = raw.seed;

    if (cfg.surface_doc.is_null())
      throw std::invalid_argument("--surface is required (or provide it via --config)");
    if (cfg.format != "csv" && cfg.format != "json")
      throw std::invalid_argument("--format must be csv or json");
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0) && set_flags.count("eps"))
      throw std::invalid_argument("--eps must be in (0, 1)");
    if (!set_flags.count("eps") && cfg.eps == 0.0) cfg.eps = 1e-6;
    if (cfg.command == "entropy" && !(cfg.tau > 0.0))
      throw std::invalid_argument("entropy requires --tau > 0");
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mce::kExitUsage;
  }

  return mce::dispatch(cfg, std::cout, std::cerr);
}
