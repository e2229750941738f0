#pragma once

#include <functional>
#include <vector>

#include "minklab/linalg.hpp"

namespace minklab {

/// Quadrature nodes and weights on S^n (solid-angle measure).
struct SphereGrid {
  int n = 1;  // sphere dimension (nodes live in R^{n+1})
  std::vector<Vec> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
  double total_weight() const;  // |S^n| up to quadrature exactness
  /// Max nearest-node spacing estimate (for Lipschitz error bounds).
  double spacing() const;
};

/// Uniform angles on S^1, weights 2*pi/m. Requires m >= 8.
SphereGrid s1_grid(int m);

/// Product rule on S^2: Gauss-Legendre in cos(theta) x uniform in phi.
/// level L gives 2L polar nodes x 4L azimuthal nodes; exact for spherical
/// polynomials of degree <= 4L-1 in cos(theta) and harmonics of order < 4L.
SphereGrid s2_grid(int level);

SphereGrid sphere_grid(int n, int size_hint);

/// Default grid sizes quoted by the acceptance tolerances.
constexpr int kDefaultS1Nodes = 2048;
constexpr int kDefaultS2Level = 50;  // 100 x 200 = 20000 nodes

/// sum_i w_i f(x_i) h(x_i)^p. Throws NonpositiveSupport if h <= 0 at a node.
double integral_fhp(const SphereGrid& grid, const std::function<double(const Vec&)>& f,
                    const std::function<double(const Vec&)>& h, double p);

/// V_q = sum_i w_i r(y_i)^q. Throws NonpositiveRadial if r <= 0 at a node.
double Vq(const SphereGrid& grid, const std::function<double(const Vec&)>& r, double q);

/// Integral of an arbitrary node function (order-fixed pairwise sum).
double integrate(const SphereGrid& grid, const std::function<double(const Vec&)>& g);

/// Fixed-degree rule on the reference simplex conv{0, e_1, .., e_n},
/// n in {1, 2, 3}; weights sum to 1 and are positive.
struct SimplexRule {
  int n = 2;
  int degree = 0;                       // exactness degree
  std::vector<std::vector<double>> nodes;  // barycentric-free reference coords
  std::vector<double> weights;
};

SimplexRule simplex_rule(int n);

/// Integral over conv(simplex vertices) with uniform refinement until two
/// successive levels differ by < 1e-10 relative (or max_level is reached).
/// Throws DegenerateSimplex.
double simplex_integrate(const std::vector<Vec>& simplex,
                         const std::function<double(const Vec&)>& integrand,
                         const SimplexRule& rule, double rel_tol = 1e-10,
                         int max_level = 7);

/// One rule application on one simplex (no refinement); building block and
/// exactness-test surface.
double simplex_apply(const std::vector<Vec>& simplex,
                     const std::function<double(const Vec&)>& integrand,
                     const SimplexRule& rule);

}  // namespace minklab
