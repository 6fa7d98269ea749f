#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mce/quad.hpp"
#include "mce/types.hpp"
#include "mce/zoo.hpp"

namespace mce {

inline constexpr const char* kVersion = "0.1.0";

// Exit code contract: 0 success/verified, 1 verification failure,
// 2 usage/parse error, 3 numeric non-convergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnconverged = 3;

/// "{lin|log}:lo:hi:count"
struct GridSpec {
  bool log = true;
  double lo = 0.0, hi = 1.0;
  int count = 2;

  std::vector<double> materialize() const;
  std::string str() const;
};

GridSpec parse_grid_spec(const std::string& text);

struct RunConfig {
  std::string command;
  nlohmann::json surface_doc;    // {"name":..., "params":...} or expr form
  std::vector<double> center;    // empty = origin
  double tau = 1.0;
  GridSpec tau_grid{true, 0.1, 1000.0, 25};
  GridSpec r_grid{true, 0.5, 50.0, 48};
  double eps = 1e-6;
  std::string format = "csv";    // csv | json
  std::string out_path;
  std::string plot_path;
  std::uint64_t seed = 0;

  QuadSpec quad_spec() const;
  std::string canonical() const;  // deterministic serialization for hashing
};

/// Resolves the --surface flag: inline JSON ('{...}'), file ('@path'), or a
/// zoo name.
nlohmann::json surface_doc_from_flag(const std::string& flag);

/// Parses "x,y,z" into coordinates.
std::vector<double> parse_center(const std::string& text);

/// FNV-1a hash of the canonical config, as 16 hex digits.
std::string config_hash_hex(const RunConfig& cfg);

/// Provenance line placed at the top of every CSV: "mce <version> <command>
/// <config-hash>".
std::string provenance_comment(const RunConfig& cfg);

/// Self-contained SVG line plot (log-x) of an entropy curve.
std::string svg_entropy_plot(const std::vector<EntropyValue>& curve, const std::string& title);

int run_entropy(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_eavr(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_blowdown(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Runs cfg.command; maps every recognized failure to the exit-code contract
/// and prints diagnostics (with source spans for expression errors) to `err`.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace mce
