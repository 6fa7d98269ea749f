#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mce/profile.hpp"
#include "mce/zoo.hpp"

namespace mce {

/// One machine-checked inequality/identity. `worst_margin` folds the
/// per-instance error allowance (quadrature brackets) into the residual, so
/// positive means satisfied; `tolerance` is the exact-arithmetic floor.
struct CheckRecord {
  std::string id;
  std::string anchor;  // mathematical statement being checked
  std::string grid;
  std::string note;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool applicable = true;
};

struct VerificationReport {
  std::string surface;
  std::vector<CheckRecord> checks;

  bool all_passed() const;
  nlohmann::ordered_json to_json() const;
};

/// f(s)/s^n nondecreasing (minimal surfaces). Failure is a report entry.
CheckRecord check_density_monotonicity(const RadialProfile& p);

/// Finite-difference shell ratios sandwiched between earlier density ratios
/// and the asymptotic ratio's upper estimate.
CheckRecord check_shell_sandwich(const RadialProfile& p, const EavrEstimate& eavr);

/// For every (r_i, tau_j): the Gaussian-weighted area dominates the truncated
/// lower-bound chain, and stays below the largest density ratio (with slack).
CheckRecord check_entropy_bounds(const RadialProfile& p, const std::vector<double>& tau_grid);

/// Cones: the entropy curve is flat within combined brackets + 1e-9.
/// Non-cone minimal surfaces: a bracket-separated increase exists.
CheckRecord check_cone_invariance(bool is_cone, const std::vector<EntropyValue>& curve);

/// |H(tau_max) - EAVR| within rtol + combined brackets, with the gap
/// trajectory monotonically closing across the converged part of the grid.
CheckRecord check_theorem(const RadialProfile& p, const std::vector<double>& tau_grid,
                          double rtol = 1e-2);

struct VerifyGrids {
  std::vector<double> r_grid;
  std::vector<double> tau_grid;
};

/// Runs the whole suite in deterministic order: minimality, the Gaussian
/// normalization identity, then the profile-based checks. A failed
/// minimality check short-circuits the minimal-only checks.
VerificationReport run_suite(const ZooEntry& entry, const AmbientVec& y0,
                             const VerifyGrids& grids, const QuadSpec& spec = {},
                             std::uint64_t seed = 0);

}  // namespace mce
