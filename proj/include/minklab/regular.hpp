#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minklab/bodies.hpp"
#include "minklab/quadrature.hpp"
#include "minklab/symmetry.hpp"

namespace minklab {

enum class Normalization { Tangent, Circumradius1 };

/// Regular polytope with closed-form coordinates. Facet data comes from the
/// dual's vertex directions, so no hull computation is needed even in R^4.
/// The symmetry group is stored only when its order fits the explicit-list
/// cap (<= 1000); the 24-, 120- and 600-cell exceed it.
struct RegularPolytope {
  std::string schlafli;
  int n = 2;  // polytope lives in R^{n+1}
  std::vector<Vec> vertices;
  std::vector<Vec> facet_normals;  // unit
  double facet_offset = 1.0;       // common offset (regularity)
  Normalization normalization = Normalization::Tangent;
  std::optional<SymmetryGroup> group;

  int dim() const { return n + 1; }
  double circumradius() const;
  double inradius() const { return facet_offset; }
  RegularPolytope normalized(Normalization target) const;
  ConvexBody body() const;
};

/// Catalog lookup. n=1: "k-gon" via symbol "{k}" or "polygon" with k;
/// n=2: {3,3} "tetrahedron", {4,3} "cube", {3,4} "octahedron",
/// {5,3} "dodecahedron", {3,5} "icosahedron"; n=3: "5-cell", "8-cell",
/// "16-cell", "24-cell", "120-cell", "600-cell"; n>=4: "simplex", "cube",
/// "cross" (data only). Throws UnknownSymbol.
RegularPolytope regular_catalog(const std::string& symbol, int n, int k = 0);

/// Nested face flag as vertex-index sets, facet first.
struct Flag {
  std::vector<std::vector<int>> faces;  // faces[j] = vertex indices of the (n-j)-face
};

/// Deterministic flag: facet 0, then lexicographically least subfaces.
Flag default_flag(const RegularPolytope& T);

/// Centroid chain O_{n+1} -> ... -> O_0 with lengths R_j = |O_j O_{j-1}|;
/// the orthogonality of the chain is exposed for verification.
struct CentroidChain {
  std::vector<Vec> centroids;  // [0] = O_{n+1} (origin), ..., [n+1] = O_0
  std::vector<double> R;       // R[j] = |O_{n+1-j} O_{n-j}| ... see chain_lengths
  /// Max over j of the orthogonality defect of O_j - O_{j-1} against the
  /// affine span of {O_0..O_{j-1}}.
  double orthogonality_residual() const;
};

CentroidChain centroid_chain(const RegularPolytope& T, const Flag& flag);

/// Base simplex Omega_n in facet coordinates (first coordinate along the
/// first in-facet chain step). Vertices are w_j = coords(O_{n-j}) with
/// w_0 = 0; all coordinates nonnegative.
struct BaseSimplex {
  int n = 2;
  std::vector<Vec> vertices;  // n+1 points in R^n, vertices[0] = 0
  Vec anchor;                 // O_n in ambient coordinates
  std::vector<Vec> frame;     // orthonormal in-facet directions u_1..u_n (spec order)
  std::int64_t chains_per_facet = 0;  // number of congruent copies tiling the facet
};

BaseSimplex base_simplex(const RegularPolytope& T, const CentroidChain& chain,
                         const Flag& flag);

/// Volume-difference integrals over Omega_n (tangent-normalized T).
/// vbar:    int (1 - |sqrt(1+|w0|^2)/(1+<z,w0>)|^{n+1}) dz
/// vbar_q:  int (1+|z|^2)^{(q-n-1)/2} (1 - |...|^q) dz
/// vbar_pf: int f (1+|z|^2)^{(-p-n-1)/2} (1 - |...|^{-p}) dz
/// Throw OutsideSimplex when w0 is not in Omega_n.
double vbar(const BaseSimplex& s, const Vec& w0);
double vbar_q(const BaseSimplex& s, const Vec& w0, double q);
double vbar_pf(const BaseSimplex& s, const Vec& w0, double p,
               const std::function<double(const Vec&)>& f_facet);

enum class VbarVariant { Volume, Q, PF };

/// d/dr vbar(r a) at r = 0: closed-form prefactor times a simplex moment.
/// Volume: (n+1) int <z,a>; Q: q int (1+|z|^2)^{(q-n-1)/2} <z,a>;
/// PF: -p int f (1+|z|^2)^{(-p-n-1)/2} <z,a>.
double derivative_at_zero(const BaseSimplex& s, const Vec& a, VbarVariant variant,
                          double pq = 0.0,
                          const std::function<double(const Vec&)>& f_facet = nullptr);

enum class LocalFunctional { V, Vq, Vpf };

struct LocalMaxReport {
  int trials = 0;
  int skipped_exact = 0;  // samples indistinguishable from T
  int violations = 0;
  double worst_margin = 0.0;  // min over samples of the lemma's strict gap
  double reference_value = 0.0;
};

/// Monte-Carlo falsification harness for the local-maximality lemmas:
/// samples invariant bodies in the normalized delta-neighborhood of T and
/// checks the strict inequality for each. Throws SampleViolation if a sample
/// beats T (which would falsify the implementation).
LocalMaxReport local_max_sample_test(const RegularPolytope& T, double delta, int trials,
                                     std::uint64_t seed, LocalFunctional functional,
                                     double q = 2.0, double p = 1.0,
                                     const SphereGrid* grid = nullptr);

/// All catalog symbols available for a given n.
std::vector<std::string> regular_catalog_symbols(int n);

}  // namespace minklab
