#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "godel/geodesics.hpp"

namespace godel::harness {

class GridSearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One timelike geodesic segment, traversed over proper time [0, s_end].
struct Arc {
  enum class Kind { kStatic, kPlanar };  ///< kStatic: ẋ = ẏ = 0, moves only (t, z)

  Kind kind = Kind::kStatic;
  GeodesicParams gp;
  double s_end = 0.0;
  SpacetimePoint start;
  SpacetimePoint end;
};

struct TransitivityResult {
  std::vector<Arc> arcs;
  SpacetimePoint reached;
  double endpoint_error = 0.0;  ///< max coordinate deviation from the target
  int subdivisions = 0;
};

struct TransitivityOptions {
  double k_max = 0.6;  ///< admissible eccentricity, strictly below 1/√2
  int grid = 401;
  int max_depth = 12;
};

/// Piecewise timelike geodesic from `from` to `to`: planar arcs bring (x, y) to the
/// target, then one or two static arcs fix (t, z).
TransitivityResult connect_points(const SpacetimePoint& from, const SpacetimePoint& to,
                                  const ModelParams& mp, const TransitivityOptions& opt = {});

/// Static arcs alone, for a pure (t, z) displacement starting at p.
std::vector<Arc> static_arcs(const SpacetimePoint& p, double dt, double dz, const ModelParams& mp);

}  // namespace godel::harness
