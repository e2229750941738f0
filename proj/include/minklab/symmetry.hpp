#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minklab/linalg.hpp"

namespace minklab {

/// Tolerances used throughout the symmetry module.
struct SymmetryTol {
  static constexpr double orthogonality = 1e-12;
  static constexpr double closure = 1e-9;  // element matching / dedup
  static constexpr double unit = 1e-12;
};

/// Finite subgroup of O(d), stored as an explicit element list.
struct SymmetryGroup {
  int dim = 0;  // ambient dimension d = n+1
  std::vector<Mat> elements;
  std::string name;

  int order() const { return static_cast<int>(elements.size()); }

  /// Dimension of the subspace fixed by every element (diagnostic: a nonzero
  /// fixed subspace implies the spanning property fails).
  int fixed_subspace_dim(double tol = 1e-9) const;

  bool contains(const Mat& m, double tol = SymmetryTol::closure) const;
};

struct Orbit {
  Vec base_point;
  std::vector<Vec> points;  // deduplicated, unit norm
};

struct SpanningReport {
  bool passes = false;
  double worst_gamma = 0.0;  // worst finite gamma over the sample
  Vec witness;               // direction achieving worst gamma, or a degenerate orbit
  bool found_degenerate = false;
  int samples = 0;
  int fixed_subspace_dim = 0;  // diagnostic only
};

bool is_orthogonal(const Mat& m, double tol = SymmetryTol::orthogonality);

/// Multiplicative closure of the generators together with the identity.
/// Throws ClosureOverflow if the closure exceeds `cap` elements and
/// NotOrthogonal if a generator is not orthogonal.
SymmetryGroup generate_group(const std::vector<Mat>& generators, int cap = 1000);

/// Orbit {phi(a)} deduplicated at the closure tolerance.
Orbit orbit(const SymmetryGroup& group, const Vec& a);

struct VertexPolytope;  // bodies.hpp

/// Convex hull of the orbit; degenerate hulls are flagged, not an error.
struct OrbitPolytope {
  Orbit orb;
  bool degenerate = false;
  int affine_rank = 0;
  std::vector<Vec> vertices;  // hull vertices when non-degenerate, else orbit points
};
OrbitPolytope orbit_polytope(const SymmetryGroup& group, const Vec& a);

/// gamma_a = max_{S^n} h_a / min_{S^n} h_a for the orbit polytope P_a.
/// Throws DegenerateOrbit when P_a is not full-dimensional.
double gamma_ratio(const SymmetryGroup& group, const Vec& a);

/// Samples gamma over orbit representatives of a quasi-uniform sphere sample
/// (one point per orbit class, which restricts work to a fundamental patch).
SpanningReport spanning_check(const SymmetryGroup& group, int sample_density);

/// Catalog groups. Names: "dihedral" (n=1, parameter k), "tetrahedral",
/// "octahedral", "icosahedral" (n=2), "simplex", "hyperoctahedral" (general n).
/// Throws UnknownGroup.
SymmetryGroup catalog(const std::string& name, int n, int k = 0);

/// Parses CLI-facing specs such as "dihedral:6", "octahedral",
/// "hyperoctahedral:3" into a catalog group.
SymmetryGroup catalog_from_spec(const std::string& spec);

/// Lexicographically greatest orbit image; canonical fundamental-domain
/// representative of a direction.
Vec canonical_direction(const SymmetryGroup& group, const Vec& a);

}  // namespace minklab
