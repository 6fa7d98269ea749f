#pragma once

#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mce/geom.hpp"

namespace mce {

/// A surface together with whatever is known about it in closed form.
struct ZooEntry {
  std::string name;    // resolved label, e.g. "k_planes(k=3)"
  Submanifold surface;
  bool is_cone = false;  // dilation-invariant about the origin

  // Closed forms, when exact: Gaussian-weighted area H(tau), the asymptotic
  // density EAVR, and the ball-volume profile f(r) about the default center.
  std::optional<std::function<double(double)>> closed_entropy;
  std::optional<double> closed_eavr;
  std::optional<std::function<double(double)>> closed_volume;
};

struct UnknownSurfaceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadSurfaceParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Names accepted by make_surface.
const std::vector<std::string>& surface_names();

/// Builds a surface by name. Recognized params (JSON object):
///   line         —
///   k_lines      — k (>=1)
///   plane        — n (1..3, default 2), ambient (default n+1)
///   offset_plane — d (>=0), n, ambient
///   k_planes     — k (>=1)
///   cone_over_link — link_length (>0), or link_exprs + link_domain for a
///                    parametric unit-norm link (checked to 1e-10)
///   catenoid     —
///   helicoid     —
///   enneper      —
///   sphere       — (non-minimal control; unit sphere through the origin)
///   expr         — exprs, n, ambient, domain (null bound = unbounded axis)
ZooEntry make_surface(const std::string& name, const nlohmann::json& params);

/// Dispatches a full surface-spec document: either
/// {"name": ..., "params": {...}} or
/// {"name":"expr","exprs":"...","n":2,"ambient":3,"domain":[[a,b],[c,d]]}.
ZooEntry make_surface_from_spec(const nlohmann::json& doc);

}  // namespace mce
