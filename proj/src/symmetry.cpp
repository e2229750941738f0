#include "minklab/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

#include "minklab/errors.hpp"
#include "minklab/hull.hpp"

namespace minklab {

namespace {

bool matrices_equal(const Mat& a, const Mat& b, double tol) {
  return (a - b).lpNorm<Eigen::Infinity>() <= tol;
}

// Orthonormal basis of the sum-zero hyperplane of R^m, as columns of an
// m x (m-1) matrix; conjugating permutation matrices by it realizes the
// symmetric group S_m inside O(m-1).
Mat sum_zero_basis(int m) {
  Mat q(m, m - 1);
  for (int j = 0; j < m - 1; ++j) {
    // Helmert basis: (1,..,1,-(j+1),0,..)/norm with j+1 leading ones.
    Vec col = Vec::Zero(m);
    for (int i = 0; i <= j; ++i) col[i] = 1.0;
    col[j + 1] = -(j + 1.0);
    q.col(j) = col / col.norm();
  }
  return q;
}

std::vector<std::vector<int>> all_permutations(int m) {
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(idx);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

Mat reflection(const Vec& n) {
  return Mat::Identity(n.size(), n.size()) - 2.0 * (n * n.transpose());
}

}  // namespace

int SymmetryGroup::fixed_subspace_dim(double tol) const {
  Mat avg = Mat::Zero(dim, dim);
  for (const Mat& m : elements) avg += m;
  avg /= static_cast<double>(elements.size());
  // avg is the orthogonal projector onto the fixed subspace.
  Eigen::JacobiSVD<Mat> svd(avg);
  int r = 0;
  for (int i = 0; i < dim; ++i)
    if (svd.singularValues()[i] > 1.0 - tol) ++r;
  return r;
}

bool SymmetryGroup::contains(const Mat& m, double tol) const {
  for (const Mat& e : elements)
    if (matrices_equal(e, m, tol)) return true;
  return false;
}

bool is_orthogonal(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  Mat defect = m.transpose() * m - Mat::Identity(m.rows(), m.cols());
  if (defect.lpNorm<Eigen::Infinity>() > tol) return false;
  double det = m.determinant();
  return std::abs(std::abs(det) - 1.0) <= 1e-10;
}

SymmetryGroup generate_group(const std::vector<Mat>& generators, int cap) {
  if (generators.empty()) fail(ErrorCode::ConfigInvalid, "no generators");
  if (cap < 1) fail(ErrorCode::ConfigInvalid, "cap must be >= 1");
  const int d = static_cast<int>(generators.front().rows());
  for (const Mat& g : generators) {
    if (!is_orthogonal(g)) fail(ErrorCode::NotOrthogonal, "generator is not orthogonal");
    if (g.rows() != d) fail(ErrorCode::ConfigInvalid, "generator dimension mismatch");
  }
  SymmetryGroup group;
  group.dim = d;
  group.elements.push_back(Mat::Identity(d, d));
  std::deque<int> frontier = {0};
  while (!frontier.empty()) {
    int idx = frontier.front();
    frontier.pop_front();
    for (const Mat& g : generators) {
      Mat m = g * group.elements[static_cast<std::size_t>(idx)];
      if (!group.contains(m)) {
        if (static_cast<int>(group.elements.size()) >= cap)
          fail(ErrorCode::ClosureOverflow,
               "closure exceeds cap (non-discrete generating set?)");
        group.elements.push_back(m);
        frontier.push_back(static_cast<int>(group.elements.size()) - 1);
      }
    }
  }
  return group;
}

Orbit orbit(const SymmetryGroup& group, const Vec& a) {
  if (std::abs(a.norm() - 1.0) > SymmetryTol::unit)
    fail(ErrorCode::ConfigInvalid, "orbit base point must be a unit vector");
  Orbit orb;
  orb.base_point = a;
  for (const Mat& m : group.elements) {
    Vec p = m * a;
    bool dup = false;
    for (const Vec& q : orb.points)
      if ((p - q).lpNorm<Eigen::Infinity>() <= SymmetryTol::closure) {
        dup = true;
        break;
      }
    if (!dup) orb.points.push_back(p);
  }
  return orb;
}

OrbitPolytope orbit_polytope(const SymmetryGroup& group, const Vec& a) {
  OrbitPolytope out;
  out.orb = orbit(group, a);
  out.affine_rank = hull_affine_rank(out.orb.points);
  if (out.affine_rank < group.dim) {
    out.degenerate = true;
    out.vertices = out.orb.points;
    return out;
  }
  Hull h = convex_hull(out.orb.points);
  out.vertices = h.vertices;
  return out;
}

double gamma_ratio(const SymmetryGroup& group, const Vec& a) {
  Orbit orb = orbit(group, a);
  if (hull_affine_rank(orb.points) < group.dim)
    fail(ErrorCode::DegenerateOrbit, "orbit polytope is not full-dimensional");
  Hull h = convex_hull(orb.points);
  // max support over the sphere = circumradius; min = distance to the
  // nearest facet plane (requires the origin inside).
  double max_h = 0.0;
  for (const Vec& v : h.vertices) max_h = std::max(max_h, v.norm());
  double min_h = std::numeric_limits<double>::max();
  for (const HullFacet& f : h.facets) min_h = std::min(min_h, f.offset);
  if (min_h <= 1e-12)
    fail(ErrorCode::DegenerateOrbit, "origin not interior to the orbit polytope");
  return max_h / min_h;
}

namespace {

std::vector<Vec> sphere_sample(int dim, int count) {
  std::vector<Vec> pts;
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      double t = 2.0 * kPi * (i + 0.5) / count;
      pts.push_back(s1_point(t));
    }
  } else if (dim == 3) {
    // Fibonacci sphere.
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      pts.push_back(vec3(r * std::cos(ga * i), r * std::sin(ga * i), z));
    }
  } else {
    // Halton-in-cube mapped by normalization; adequate coverage for d = 4.
    for (int i = 0; i < count; ++i) {
      Vec v(dim);
      static const int primes[4] = {2, 3, 5, 7};
      double norm = 0.0;
      for (int j = 0; j < dim; ++j) {
        // inverse-normal-ish via symmetric triangular sum of two Haltons
        double u = halton(static_cast<std::uint64_t>(i) + 1, primes[j]);
        v[j] = std::tan(kPi * (u - 0.5) * 0.98);
        norm += v[j] * v[j];
      }
      if (norm < 1e-12) continue;
      pts.push_back(v / std::sqrt(norm));
    }
  }
  return pts;
}

}  // namespace

Vec canonical_direction(const SymmetryGroup& group, const Vec& a) {
  Vec best = a;
  for (const Mat& m : group.elements) {
    Vec p = m * a;
    if (lex_compare(p, best, 1e-12) > 0) best = p;
  }
  return best;
}

SpanningReport spanning_check(const SymmetryGroup& group, int sample_density) {
  if (sample_density < 10)
    fail(ErrorCode::ConfigInvalid, "sample_density must be >= 10 per angular dimension");
  SpanningReport rep;
  rep.fixed_subspace_dim = group.fixed_subspace_dim();
  const int d = group.dim;
  int count = 1;
  for (int i = 0; i < d - 1; ++i) count *= sample_density;
  count = std::min(count, 4000);
  std::vector<Vec> sample = sphere_sample(d, count);
  // Axis directions catch polar degeneracies exactly.
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    sample.push_back(e);
    sample.push_back(-e);
  }
  std::vector<Vec> seen_reps;
  rep.passes = true;
  for (const Vec& a : sample) {
    Vec r = canonical_direction(group, a);
    bool dup = false;
    for (const Vec& s : seen_reps)
      if ((r - s).lpNorm<Eigen::Infinity>() <= 1e-9) {
        dup = true;
        break;
      }
    if (dup) continue;
    seen_reps.push_back(r);
    ++rep.samples;
    Orbit orb = orbit(group, r);
    if (hull_affine_rank(orb.points) < d) {
      rep.passes = false;
      rep.found_degenerate = true;
      rep.witness = r;
      continue;
    }
    double g = gamma_ratio(group, r);
    if (g > rep.worst_gamma) {
      rep.worst_gamma = g;
      if (rep.passes) rep.witness = r;
    }
  }
  return rep;
}

namespace {

SymmetryGroup dihedral_group(int k) {
  if (k < 1) fail(ErrorCode::UnknownGroup, "dihedral order parameter must be >= 1");
  SymmetryGroup g;
  g.dim = 2;
  for (int j = 0; j < k; ++j) {
    double t = 2.0 * kPi * j / k;
    Mat rot(2, 2);
    rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    g.elements.push_back(rot);
    Mat ref(2, 2);  // reflection across the line at angle t/2
    ref << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
    g.elements.push_back(ref);
  }
  std::ostringstream name;
  name << "dihedral:" << k;
  g.name = name.str();
  return g;
}

SymmetryGroup hyperoctahedral_group(int n) {
  const int d = n + 1;
  if (d < 2 || d > 5) fail(ErrorCode::UnknownGroup, "hyperoctahedral supported for n in 1..4");
  SymmetryGroup g;
  g.dim = d;
  for (const auto& perm : all_permutations(d)) {
    for (int signs = 0; signs < (1 << d); ++signs) {
      Mat m = Mat::Zero(d, d);
      for (int i = 0; i < d; ++i) m(perm[static_cast<std::size_t>(i)], i) = (signs >> i) & 1 ? -1.0 : 1.0;
      g.elements.push_back(m);
    }
  }
  std::ostringstream name;
  name << "hyperoctahedral:" << n;
  g.name = name.str();
  return g;
}

SymmetryGroup simplex_group(int n) {
  // Symmetry group of the regular n-simplex in R^{n+1}: S_{n+2} acting on the
  // sum-zero hyperplane of R^{n+2}.
  const int d = n + 1;
  const int m = n + 2;
  if (m > 6) fail(ErrorCode::UnknownGroup, "simplex group supported for n <= 4");
  Mat q = sum_zero_basis(m);
  SymmetryGroup g;
  g.dim = d;
  for (const auto& perm : all_permutations(m)) {
    Mat pm = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) pm(perm[static_cast<std::size_t>(i)], i) = 1.0;
    g.elements.push_back(q.transpose() * pm * q);
  }
  std::ostringstream name;
  name << "simplex:" << n;
  g.name = name.str();
  return g;
}

SymmetryGroup tetrahedral_group() {
  // Full symmetry group of conv{(1,1,1),(1,-1,-1),(-1,1,-1),(-1,-1,1)}:
  // coordinate permutations times even sign changes; order 24.
  SymmetryGroup g;
  g.dim = 3;
  for (const auto& perm : all_permutations(3)) {
    for (int signs = 0; signs < 8; ++signs) {
      int bits = ((signs >> 0) & 1) + ((signs >> 1) & 1) + ((signs >> 2) & 1);
      if (bits % 2 != 0) continue;
      Mat m = Mat::Zero(3, 3);
      for (int i = 0; i < 3; ++i) m(perm[static_cast<std::size_t>(i)], i) = (signs >> i) & 1 ? -1.0 : 1.0;
      g.elements.push_back(m);
    }
  }
  g.name = "tetrahedral";
  return g;
}

SymmetryGroup icosahedral_group() {
  // Reflections through three mirror planes generate the full icosahedral
  // group (order 120) in the standard orientation (2-fold axes along the
  // coordinate axes).
  const double phi = kGolden;
  std::vector<Mat> gens = {
      reflection(vec3(1.0, 0.0, 0.0)),
      reflection(vec3(0.0, 1.0, 0.0)),
      reflection(vec3(0.5, 0.5 / phi, 0.5 * phi)),
  };
  SymmetryGroup g = generate_group(gens, 200);
  g.name = "icosahedral";
  return g;
}

}  // namespace

SymmetryGroup catalog(const std::string& name, int n, int k) {
  if (name == "dihedral") {
    if (n != 1) fail(ErrorCode::UnknownGroup, "dihedral is the n=1 catalog entry");
    return dihedral_group(k);
  }
  if (name == "tetrahedral") {
    if (n != 2) fail(ErrorCode::UnknownGroup, "tetrahedral is the n=2 catalog entry");
    return tetrahedral_group();
  }
  if (name == "octahedral") {
    if (n != 2) fail(ErrorCode::UnknownGroup, "octahedral is the n=2 catalog entry");
    SymmetryGroup g = hyperoctahedral_group(2);
    g.name = "octahedral";
    return g;
  }
  if (name == "icosahedral") {
    if (n != 2) fail(ErrorCode::UnknownGroup, "icosahedral is the n=2 catalog entry");
    return icosahedral_group();
  }
  if (name == "simplex") return simplex_group(n);
  if (name == "hyperoctahedral") return hyperoctahedral_group(n);
  fail(ErrorCode::UnknownGroup, "unknown catalog group: " + name);
}

SymmetryGroup catalog_from_spec(const std::string& spec) {
  std::string name = spec;
  int param = 0;
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    name = spec.substr(0, colon);
    param = std::atoi(spec.c_str() + colon + 1);
  }
  if (name == "dihedral") return catalog(name, 1, param);
  if (name == "tetrahedral" || name == "octahedral" || name == "icosahedral")
    return catalog(name, 2);
  if (name == "simplex" || name == "hyperoctahedral") {
    int n = param > 0 ? param : 2;
    return catalog(name, n);
  }
  fail(ErrorCode::UnknownGroup, "unknown group spec: " + spec);
}

}  // namespace minklab
