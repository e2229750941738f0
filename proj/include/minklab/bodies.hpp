#pragma once

#include <functional>
#include <string>
#include <vector>

#include "minklab/hull.hpp"
#include "minklab/linalg.hpp"
#include "minklab/symmetry.hpp"

namespace minklab {

/// Intersection of half-spaces {x : <n_i, x> <= h_i}, origin interior.
struct FacetPolytope {
  int dim = 0;
  std::vector<Vec> normals;     // unit
  std::vector<double> offsets;  // > 0
};

/// Convex hull of a vertex list (minimal: every listed point is extreme).
struct VertexPolytope {
  int dim = 0;
  std::vector<Vec> vertices;
};

enum class BodySource { FacetList, VertexList, Grid };

/// Support/radial view of a convex body containing the origin.
struct BodyView {
  int dim = 0;
  std::function<double(const Vec&)> support;
  std::function<double(const Vec&)> radial;
  BodySource source = BodySource::Grid;
  double min_support_uncertainty = 0.0;  // Lipschitz * grid spacing for grid views
};

/// Both representations of a convex polytope with the derived quantities the
/// functionals need. Facets are irredundant (pruning is recorded, not silent).
class ConvexBody {
 public:
  static ConvexBody from_vertices(const VertexPolytope& p);
  static ConvexBody from_facets(const FacetPolytope& p);

  int dim() const { return dim_; }
  const FacetPolytope& facets() const { return facets_; }
  const VertexPolytope& vertices() const { return vertices_; }
  /// Input facet indices removed as redundant (from_facets only).
  const std::vector<int>& pruned_facets() const { return pruned_; }

  double support(const Vec& x) const;
  double radial(const Vec& y) const;

  /// Euclidean volume via the facet-pyramid decomposition
  /// |Omega| = (1/d) sum_i h_i area(F_i), facet areas by triangulation.
  double volume() const { return volume_; }
  /// V(Omega) = d * |Omega| (the paper-normalized volume, d = n+1).
  double V() const { return dim_ * volume_; }

  double min_support() const;  // = inradius about the origin
  double max_support() const;  // = circumradius

  ConvexBody scaled(double mu) const;

  BodyView view() const;

  /// Per-facet areas aligned with facets().normals.
  const std::vector<double>& facet_areas() const { return areas_; }

 private:
  int dim_ = 0;
  FacetPolytope facets_;
  VertexPolytope vertices_;
  std::vector<double> areas_;
  double volume_ = 0.0;
  std::vector<int> pruned_;
};

/// Hull/halfspace duality: vertices of a facet polytope or facets of a vertex
/// polytope. Round-trip reproduces the input up to reordering and 1e-9.
VertexPolytope dualize(const FacetPolytope& p);
FacetPolytope dualize(const VertexPolytope& p);

/// Polar body: polar of {<n_i,x> <= h_i} is conv{n_i/h_i} and vice versa.
ConvexBody polar(const ConvexBody& body);

struct SphereGrid;  // quadrature.hpp

/// sup over the grid of |h_A - h_B|; the support-sup metric equals the
/// Hausdorff distance for convex bodies. Error is O(Lipschitz * spacing).
double hausdorff(const BodyView& a, const BodyView& b, const SphereGrid& grid);

/// Intersection of the orbit under `group` of the supporting half-space of
/// `body` at x0. Contains the body; group-invariant.
/// Throws Unbounded when the orbit of x0 does not positively span.
ConvexBody cut_polytope(const BodyView& body, const Vec& x0, const SymmetryGroup& group);

/// Group-invariance defect max over grid nodes and group elements of
/// |h(phi^T x) - h(x)|.
double invariance_defect(const BodyView& body, const SymmetryGroup& group,
                         const SphereGrid& grid);

/// Facet list formed by the orbits of (direction, offset) classes; duplicate
/// facets across classes are removed. class_of (optional) receives the class
/// index of each emitted facet.
FacetPolytope make_orbit_facets(const SymmetryGroup& group,
                                const std::vector<std::pair<Vec, double>>& classes,
                                std::vector<int>* class_of = nullptr);

}  // namespace minklab
