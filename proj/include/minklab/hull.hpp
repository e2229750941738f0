#pragma once

#include <vector>

#include "minklab/linalg.hpp"

namespace minklab {

/// A facet of a convex hull after merging coplanar simplices.
struct HullFacet {
  Vec normal;                 // outward unit normal
  double offset = 0.0;        // supporting-plane offset: <normal, x> = offset on the facet
  std::vector<int> vertices;  // indices into Hull::vertices
  double area = 0.0;          // (d-1)-measure of the facet
};

/// Convex hull of a point set in dimension 2..4.
///
/// Incremental insertion in farthest-point-first order with conflict lists.
/// Plane equations are formed in extended precision (long double) so that the
/// exactly-coplanar configurations produced by symmetric inputs classify
/// cleanly against the 1e-9 merge tolerance. A ridge whose cone to the apex
/// would be degenerate promotes the facet across it into the visible set and
/// the horizon is recomputed.
struct Hull {
  int dim = 0;
  std::vector<Vec> vertices;      // extreme points only (minimal list)
  std::vector<HullFacet> facets;  // merged, irredundant facets
  double volume = 0.0;            // d-volume, from the simplicial decomposition

  /// Which input points survived as hull vertices (index into the input list).
  std::vector<int> vertex_source;
};

struct HullOptions {
  double merge_tol = 1e-9;  // plane/point coincidence tolerance
};

/// Returns the affine rank of the point set (cheap pre-check for callers that
/// must flag degenerate inputs instead of erroring).
int hull_affine_rank(const std::vector<Vec>& pts, double tol = 1e-9);

/// Computes the convex hull. Throws Error(DegenerateHull) when the points do
/// not span the ambient dimension.
Hull convex_hull(const std::vector<Vec>& pts, const HullOptions& opts = {});

}  // namespace minklab
