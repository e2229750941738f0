#include "minklab/regular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "minklab/errors.hpp"
#include "minklab/functionals.hpp"

namespace minklab {

namespace {

std::vector<Vec> dedup_points(std::vector<Vec> pts, double tol = 1e-9) {
  std::vector<Vec> out;
  for (const Vec& p : pts) {
    bool dup = false;
    for (const Vec& q : out)
      if ((p - q).lpNorm<Eigen::Infinity>() <= tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  return out;
}

// All distinct signed permutations of a base tuple; even_only restricts to
// even permutations (the 120-cell and 600-cell tables need both kinds).
std::vector<Vec> sign_perms(const std::vector<double>& base, bool even_only) {
  const int d = static_cast<int>(base.size());
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  std::vector<Vec> out;
  // Walk all index permutations tracking parity via explicit inversion count.
  std::sort(idx.begin(), idx.end());
  do {
    int inv = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (idx[i] > idx[j]) ++inv;
    if (even_only && inv % 2 != 0) continue;
    for (int signs = 0; signs < (1 << d); ++signs) {
      Vec v(d);
      for (int i = 0; i < d; ++i) {
        double val = base[static_cast<std::size_t>(idx[i])];
        v[i] = ((signs >> i) & 1) ? -val : val;
      }
      out.push_back(v);
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  return dedup_points(std::move(out), 1e-12);
}

std::vector<Vec> simplex_vertices(int n) {
  const int m = n + 2;
  Mat q(m, m - 1);
  for (int j = 0; j < m - 1; ++j) {
    Vec col = Vec::Zero(m);
    for (int i = 0; i <= j; ++i) col[i] = 1.0;
    col[j + 1] = -(j + 1.0);
    q.col(j) = col / col.norm();
  }
  std::vector<Vec> verts;
  for (int i = 0; i < m; ++i) verts.push_back(q.row(i).transpose());
  return verts;
}

std::vector<Vec> normalize_all(const std::vector<Vec>& dirs) {
  std::vector<Vec> out;
  out.reserve(dirs.size());
  for (const Vec& v : dirs) out.push_back(unit(v));
  return out;
}

double common_offset(const std::vector<Vec>& vertices, const std::vector<Vec>& normals) {
  // All facets of a regular polytope are equidistant; take the support of the
  // vertex set in the first normal direction and verify the rest agree.
  double h0 = -std::numeric_limits<double>::max();
  for (const Vec& v : vertices) h0 = std::max(h0, v.dot(normals.front()));
  for (const Vec& n : normals) {
    double h = -std::numeric_limits<double>::max();
    for (const Vec& v : vertices) h = std::max(h, v.dot(n));
    if (std::abs(h - h0) > 1e-10)
      fail(ErrorCode::NumericalFailure, "catalog facet offsets are not uniform");
  }
  return h0;
}

std::vector<Vec> vertices_600cell() {
  const double phi = kGolden;
  std::vector<Vec> v;
  auto half = sign_perms({0.5, 0.5, 0.5, 0.5}, false);
  auto axes = sign_perms({1.0, 0.0, 0.0, 0.0}, false);
  auto golden = sign_perms({phi / 2.0, 0.5, 1.0 / (2.0 * phi), 0.0}, true);
  v.insert(v.end(), half.begin(), half.end());
  v.insert(v.end(), axes.begin(), axes.end());
  v.insert(v.end(), golden.begin(), golden.end());
  return dedup_points(std::move(v), 1e-12);
}

// The 120-cell and 600-cell are derived from the single 600-cell vertex
// table: the 600-cell's facet planes come from its own hull, and the
// 120-cell is the tangent intersection of half-spaces along the 600-cell
// vertex directions. This keeps the dual pair in one consistent orientation.

}  // namespace

double RegularPolytope::circumradius() const {
  double r = 0.0;
  for (const Vec& v : vertices) r = std::max(r, v.norm());
  return r;
}

RegularPolytope RegularPolytope::normalized(Normalization target) const {
  double scale = 1.0;
  if (target == Normalization::Tangent) {
    scale = 1.0 / facet_offset;
  } else {
    scale = 1.0 / circumradius();
  }
  RegularPolytope out = *this;
  for (Vec& v : out.vertices) v *= scale;
  out.facet_offset *= scale;
  out.normalization = target;
  return out;
}

ConvexBody RegularPolytope::body() const {
  VertexPolytope vp;
  vp.dim = dim();
  vp.vertices = vertices;
  return ConvexBody::from_vertices(vp);
}

RegularPolytope regular_catalog(const std::string& symbol, int n, int k) {
  RegularPolytope T;
  T.n = n;
  const double phi = kGolden;
  if (n == 1) {
    int kk = k;
    if (symbol == "triangle") kk = 3;
    else if (symbol == "square") kk = 4;
    else if (symbol == "pentagon") kk = 5;
    else if (symbol == "hexagon") kk = 6;
    else if (symbol != "polygon" && !symbol.empty()) {
      if (symbol.size() > 2 && symbol.front() == '{' && symbol.back() == '}')
        kk = std::atoi(symbol.substr(1, symbol.size() - 2).c_str());
      else if (kk <= 0)
        fail(ErrorCode::UnknownSymbol, "unknown n=1 symbol: " + symbol);
    }
    if (kk < 3) fail(ErrorCode::UnknownSymbol, "polygon needs k >= 3");
    std::ostringstream name;
    name << "{" << kk << "}";
    T.schlafli = name.str();
    // Tangent form: edge normals at angles 2 pi j / k with offset 1.
    const double R = 1.0 / std::cos(kPi / kk);
    for (int j = 0; j < kk; ++j) {
      T.facet_normals.push_back(s1_point(2.0 * kPi * j / kk));
      T.vertices.push_back(R * s1_point(2.0 * kPi * (j + 0.5) / kk));
    }
    T.facet_offset = 1.0;
    T.group = catalog("dihedral", 1, kk);
    return T;
  }
  if (n == 2) {
    std::string s = symbol;
    if (s == "{3,3}") s = "tetrahedron";
    if (s == "{4,3}") s = "cube";
    if (s == "{3,4}") s = "octahedron";
    if (s == "{5,3}") s = "dodecahedron";
    if (s == "{3,5}") s = "icosahedron";
    if (s == "tetrahedron") {
      T.schlafli = "{3,3}";
      T.vertices = {vec3(1, 1, 1), vec3(1, -1, -1), vec3(-1, 1, -1), vec3(-1, -1, 1)};
      for (const Vec& v : T.vertices) T.facet_normals.push_back(-unit(v));
      T.group = catalog("tetrahedral", 2);
    } else if (s == "cube") {
      T.schlafli = "{4,3}";
      T.vertices = sign_perms({1.0, 1.0, 1.0}, false);
      T.facet_normals = normalize_all(sign_perms({1.0, 0.0, 0.0}, false));
      T.group = catalog("octahedral", 2);
    } else if (s == "octahedron") {
      T.schlafli = "{3,4}";
      T.vertices = sign_perms({1.0, 0.0, 0.0}, false);
      T.facet_normals = normalize_all(sign_perms({1.0, 1.0, 1.0}, false));
      T.group = catalog("octahedral", 2);
    } else if (s == "dodecahedron") {
      T.schlafli = "{5,3}";
      T.vertices = sign_perms({1.0, 1.0, 1.0}, false);
      for (const Vec& v : sign_perms({0.0, phi, 1.0 / phi}, true)) T.vertices.push_back(v);
      T.vertices = dedup_points(std::move(T.vertices), 1e-12);
      T.facet_normals = normalize_all(sign_perms({0.0, 1.0, phi}, true));
      T.group = catalog("icosahedral", 2);
    } else if (s == "icosahedron") {
      T.schlafli = "{3,5}";
      T.vertices = sign_perms({0.0, 1.0, phi}, true);
      std::vector<Vec> dirs = sign_perms({1.0, 1.0, 1.0}, false);
      for (const Vec& v : sign_perms({0.0, phi, 1.0 / phi}, true)) dirs.push_back(v);
      T.facet_normals = normalize_all(dedup_points(std::move(dirs), 1e-12));
      T.group = catalog("icosahedral", 2);
    } else {
      fail(ErrorCode::UnknownSymbol, "unknown n=2 symbol: " + symbol);
    }
  } else if (n == 3) {
    std::string s = symbol;
    if (s == "{3,3,3}") s = "5-cell";
    if (s == "{4,3,3}") s = "8-cell";
    if (s == "{3,3,4}") s = "16-cell";
    if (s == "{3,4,3}") s = "24-cell";
    if (s == "{5,3,3}") s = "120-cell";
    if (s == "{3,3,5}") s = "600-cell";
    if (s == "5-cell") {
      T.schlafli = "{3,3,3}";
      T.vertices = simplex_vertices(3);
      for (const Vec& v : T.vertices) T.facet_normals.push_back(-unit(v));
      T.group = catalog("simplex", 3);
    } else if (s == "8-cell") {
      T.schlafli = "{4,3,3}";
      T.vertices = sign_perms({1.0, 1.0, 1.0, 1.0}, false);
      T.facet_normals = normalize_all(sign_perms({1.0, 0.0, 0.0, 0.0}, false));
      T.group = catalog("hyperoctahedral", 3);
    } else if (s == "16-cell") {
      T.schlafli = "{3,3,4}";
      T.vertices = sign_perms({1.0, 0.0, 0.0, 0.0}, false);
      T.facet_normals = normalize_all(sign_perms({1.0, 1.0, 1.0, 1.0}, false));
      T.group = catalog("hyperoctahedral", 3);
    } else if (s == "24-cell") {
      T.schlafli = "{3,4,3}";
      T.vertices = sign_perms({1.0, 1.0, 0.0, 0.0}, false);
      std::vector<Vec> dirs = sign_perms({1.0, 0.0, 0.0, 0.0}, false);
      for (const Vec& v : sign_perms({0.5, 0.5, 0.5, 0.5}, false)) dirs.push_back(v);
      T.facet_normals = normalize_all(dirs);
      // F4 symmetry has order 1152, beyond the explicit-list cap.
    } else if (s == "120-cell") {
      T.schlafli = "{5,3,3}";
      T.facet_normals = normalize_all(vertices_600cell());
      FacetPolytope fp;
      fp.dim = 4;
      fp.normals = T.facet_normals;
      fp.offsets.assign(T.facet_normals.size(), 1.0);
      T.vertices = ConvexBody::from_facets(fp).vertices().vertices;
    } else if (s == "600-cell") {
      T.schlafli = "{3,3,5}";
      T.vertices = vertices_600cell();
      Hull h = convex_hull(T.vertices);
      for (const HullFacet& f : h.facets) T.facet_normals.push_back(f.normal);
    } else {
      fail(ErrorCode::UnknownSymbol, "unknown n=3 symbol: " + symbol);
    }
  } else if (n >= 4) {
    const int d = n + 1;
    if (symbol == "simplex") {
      std::ostringstream name;
      name << "simplex-" << n;
      T.schlafli = name.str();
      T.vertices = simplex_vertices(n);
      for (const Vec& v : T.vertices) T.facet_normals.push_back(-unit(v));
    } else if (symbol == "cube") {
      T.schlafli = "cube-" + std::to_string(n);
      T.vertices = sign_perms(std::vector<double>(static_cast<std::size_t>(d), 1.0), false);
      std::vector<double> axis(static_cast<std::size_t>(d), 0.0);
      axis[0] = 1.0;
      T.facet_normals = normalize_all(sign_perms(axis, false));
    } else if (symbol == "cross") {
      T.schlafli = "cross-" + std::to_string(n);
      std::vector<double> axis(static_cast<std::size_t>(d), 0.0);
      axis[0] = 1.0;
      T.vertices = sign_perms(axis, false);
      T.facet_normals =
          normalize_all(sign_perms(std::vector<double>(static_cast<std::size_t>(d), 1.0), false));
    } else {
      fail(ErrorCode::UnknownSymbol, "unknown n>=4 symbol: " + symbol);
    }
  } else {
    fail(ErrorCode::UnknownSymbol, "no catalog for n = " + std::to_string(n));
  }
  T.facet_offset = common_offset(T.vertices, T.facet_normals);
  return RegularPolytope(T).normalized(Normalization::Tangent);
}

std::vector<std::string> regular_catalog_symbols(int n) {
  switch (n) {
    case 1: return {"polygon"};
    case 2: return {"tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron"};
    case 3: return {"5-cell", "8-cell", "16-cell", "24-cell", "120-cell", "600-cell"};
    default: return {"simplex", "cube", "cross"};
  }
}

namespace {

std::vector<int> vertices_on_plane(const RegularPolytope& T, const Vec& normal, double offset) {
  std::vector<int> on;
  for (int i = 0; i < static_cast<int>(T.vertices.size()); ++i)
    if (std::abs(T.vertices[static_cast<std::size_t>(i)].dot(normal) - offset) <= 1e-9)
      on.push_back(i);
  return on;
}

int face_rank(const RegularPolytope& T, const std::vector<int>& face) {
  std::vector<Vec> pts;
  for (int i : face) pts.push_back(T.vertices[static_cast<std::size_t>(i)]);
  return affine_rank(pts, 1e-9);
}

// (k-1)-subfaces of a face: maximal-rank intersections with other facets.
std::vector<std::vector<int>> subfaces(const RegularPolytope& T, const std::vector<int>& face,
                                       int face_dim) {
  std::set<std::vector<int>> found;
  for (std::size_t fi = 0; fi < T.facet_normals.size(); ++fi) {
    std::vector<int> on = vertices_on_plane(T, T.facet_normals[fi], T.facet_offset);
    std::vector<int> inter;
    std::set_intersection(face.begin(), face.end(), on.begin(), on.end(),
                          std::back_inserter(inter));
    if (inter == face || inter.empty()) continue;
    if (face_rank(T, inter) == face_dim - 1) found.insert(inter);
  }
  return {found.begin(), found.end()};
}

Vec face_centroid(const RegularPolytope& T, const std::vector<int>& face) {
  Vec c = Vec::Zero(T.dim());
  for (int i : face) c += T.vertices[static_cast<std::size_t>(i)];
  return c / static_cast<double>(face.size());
}

}  // namespace

Flag default_flag(const RegularPolytope& T) {
  Flag flag;
  std::vector<int> face = vertices_on_plane(T, T.facet_normals.front(), T.facet_offset);
  std::sort(face.begin(), face.end());
  if (face.empty()) fail(ErrorCode::InvalidFlag, "facet carries no vertices");
  flag.faces.push_back(face);
  int dim = T.n;  // facet dimension
  while (dim > 0) {
    auto subs = subfaces(T, flag.faces.back(), dim);
    if (subs.empty()) fail(ErrorCode::InvalidFlag, "face lattice walk found no subface");
    flag.faces.push_back(subs.front());  // std::set order: lexicographically least
    --dim;
  }
  return flag;
}

double CentroidChain::orthogonality_residual() const {
  // centroids[0] = O_{n+1}, ..., centroids[n+1] = O_0.
  const int m = static_cast<int>(centroids.size());
  double worst = 0.0;
  for (int a = 0; a < m - 1; ++a) {
    // step O_j -> O_{j-1} with j = n+1-a: direction v \perp affine span of
    // {O_0 ... O_{j-1}} = points centroids[a+1 .. m-1].
    Vec v = centroids[static_cast<std::size_t>(a + 1)] - centroids[static_cast<std::size_t>(a)];
    double vn = v.norm();
    if (vn < 1e-14) continue;
    const Vec& base = centroids[static_cast<std::size_t>(a + 1)];
    for (int b = a + 2; b < m; ++b) {
      Vec w = centroids[static_cast<std::size_t>(b)] - base;
      double wn = w.norm();
      if (wn < 1e-14) continue;
      worst = std::max(worst, std::abs(v.dot(w)) / (vn * wn));
    }
  }
  return worst;
}

CentroidChain centroid_chain(const RegularPolytope& T, const Flag& flag) {
  if (static_cast<int>(flag.faces.size()) != T.n + 1)
    fail(ErrorCode::InvalidFlag, "flag must have one face per dimension");
  CentroidChain chain;
  chain.centroids.push_back(Vec::Zero(T.dim()));  // O_{n+1}: centroid of T
  for (const auto& face : flag.faces) chain.centroids.push_back(face_centroid(T, face));
  for (std::size_t i = 0; i + 1 < chain.centroids.size(); ++i)
    chain.R.push_back((chain.centroids[i + 1] - chain.centroids[i]).norm());
  return chain;
}

BaseSimplex base_simplex(const RegularPolytope& T, const CentroidChain& chain, const Flag& flag) {
  const int n = T.n;
  if (T.normalization != Normalization::Tangent ||
      std::abs(chain.centroids[1].norm() - 1.0) > 1e-9)
    fail(ErrorCode::ConfigInvalid, "base simplex requires the tangent normalization");
  BaseSimplex s;
  s.n = n;
  s.anchor = chain.centroids[1];  // O_n, the tangency point of the facet
  // Frame: coordinate i along the i-th in-facet chain step O_{n+1-i} -> O_{n-i}.
  for (int i = 1; i <= n; ++i) {
    Vec u = chain.centroids[static_cast<std::size_t>(i + 1)] - chain.centroids[static_cast<std::size_t>(i)];
    double un = u.norm();
    if (un < 1e-13) fail(ErrorCode::InvalidFlag, "degenerate chain step");
    s.frame.push_back(u / un);
  }
  // Vertices w_m = coordinates of O_{n-m}; w_0 = 0.
  for (int m = 0; m <= n; ++m) {
    Vec w = Vec::Zero(n);
    Vec x = chain.centroids[static_cast<std::size_t>(m + 1)] - s.anchor;
    for (int i = 0; i < n; ++i) w[i] = s.frame[static_cast<std::size_t>(i)].dot(x);
    s.vertices.push_back(w);
  }
  // Chains through one facet: product of subface counts down the flag.
  std::int64_t count = 1;
  int dim = n;
  for (std::size_t level = 0; level + 1 < flag.faces.size(); ++level) {
    count *= static_cast<std::int64_t>(subfaces(T, flag.faces[level], dim).size());
    --dim;
  }
  s.chains_per_facet = count;
  return s;
}

namespace {

void check_w0(const BaseSimplex& s, const Vec& w0) {
  // Barycentric containment. The tolerance admits a thin collar outside the
  // boundary so that central differences across w0 = 0 are well-posed.
  constexpr double tol = 1e-3;
  const int n = s.n;
  Mat E(n, n);
  for (int i = 1; i <= n; ++i) E.col(i - 1) = s.vertices[static_cast<std::size_t>(i)] - s.vertices[0];
  Vec lam = E.partialPivLu().solve(w0 - s.vertices[0]);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (lam[i] < -tol) fail(ErrorCode::OutsideSimplex, "w0 outside the base simplex");
    sum += lam[i];
  }
  if (sum > 1.0 + tol) fail(ErrorCode::OutsideSimplex, "w0 outside the base simplex");
}

double vbar_general(const BaseSimplex& s, const Vec& w0, double ratio_exponent,
                    double weight_exponent, const std::function<double(const Vec&)>& f_facet) {
  check_w0(s, w0);
  const double root = std::sqrt(1.0 + w0.squaredNorm());
  SimplexRule rule = simplex_rule(s.n);
  auto integrand = [&](const Vec& z) {
    double denom = 1.0 + z.dot(w0);
    double core = 1.0 - std::pow(std::abs(root / denom), ratio_exponent);
    double weight = weight_exponent == 0.0
                        ? 1.0
                        : std::pow(1.0 + z.squaredNorm(), weight_exponent);
    double fv = f_facet ? f_facet(z) : 1.0;
    return fv * weight * core;
  };
  return simplex_integrate(s.vertices, integrand, rule);
}

}  // namespace

double vbar(const BaseSimplex& s, const Vec& w0) {
  return vbar_general(s, w0, static_cast<double>(s.n + 1), 0.0, nullptr);
}

double vbar_q(const BaseSimplex& s, const Vec& w0, double q) {
  return vbar_general(s, w0, q, 0.5 * (q - s.n - 1.0), nullptr);
}

double vbar_pf(const BaseSimplex& s, const Vec& w0, double p,
               const std::function<double(const Vec&)>& f_facet) {
  return vbar_general(s, w0, -p, 0.5 * (-p - s.n - 1.0), f_facet);
}

double derivative_at_zero(const BaseSimplex& s, const Vec& a, VbarVariant variant, double pq,
                          const std::function<double(const Vec&)>& f_facet) {
  bool in_cone = false;
  for (int i = 0; i < s.n; ++i) {
    if (a[i] < -1e-12) fail(ErrorCode::ConfigInvalid, "direction must lie in R^n_+");
    if (a[i] > 0.0) in_cone = true;
  }
  if (!in_cone) fail(ErrorCode::ConfigInvalid, "direction must be nonzero");
  SimplexRule rule = simplex_rule(s.n);
  double prefactor = 0.0;
  double weight_exponent = 0.0;
  switch (variant) {
    case VbarVariant::Volume:
      prefactor = static_cast<double>(s.n + 1);
      weight_exponent = 0.0;
      break;
    case VbarVariant::Q:
      prefactor = pq;  // q
      weight_exponent = 0.5 * (pq - s.n - 1.0);
      break;
    case VbarVariant::PF:
      prefactor = -pq;  // -p
      weight_exponent = 0.5 * (-pq - s.n - 1.0);
      break;
  }
  auto integrand = [&](const Vec& z) {
    double weight = weight_exponent == 0.0 ? 1.0 : std::pow(1.0 + z.squaredNorm(), weight_exponent);
    double fv = (variant == VbarVariant::PF && f_facet) ? f_facet(z) : 1.0;
    return fv * weight * z.dot(a);
  };
  return prefactor * simplex_integrate(s.vertices, integrand, rule);
}

namespace {

struct SampleClasses {
  std::vector<std::pair<Vec, double>> classes;
};

}  // namespace

LocalMaxReport local_max_sample_test(const RegularPolytope& T_in, double delta, int trials,
                                     std::uint64_t seed, LocalFunctional functional, double q,
                                     double p, const SphereGrid* grid_opt) {
  const bool max_frame = (functional == LocalFunctional::Vpf);
  RegularPolytope T =
      T_in.normalized(max_frame ? Normalization::Circumradius1 : Normalization::Tangent);
  if (!T.group) fail(ErrorCode::ConfigInvalid, "sample test needs an explicit symmetry group");
  const SymmetryGroup& G = *T.group;
  const int d = T.dim();
  SphereGrid grid = grid_opt ? *grid_opt : sphere_grid(d - 1, d == 2 ? 2048 : 4096);

  ConvexBody Tbody = T.body();
  BodyView Tview = Tbody.view();
  DensitySpec f1 = DensitySpec::constant(1.0);
  auto value_of = [&](const ConvexBody& b) {
    switch (functional) {
      case LocalFunctional::V: return b.V();
      case LocalFunctional::Vq: return Vq(grid, b.view().radial, q);
      case LocalFunctional::Vpf:
        return integral_fhp(grid, f1.f, b.view().support, p);
    }
    return 0.0;
  };
  const double vT = value_of(Tbody);

  LocalMaxReport rep;
  rep.trials = trials;
  rep.reference_value = vT;
  rep.worst_margin = std::numeric_limits<double>::max();
  const Vec base_dir = T.facet_normals.front();

  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    ConvexBody cand;
    bool built = false;
    double dist = 0.0;
    double scale = 1.0;
    for (int attempt = 0; attempt < 10 && !built; ++attempt, scale *= 0.5) {
      std::vector<std::pair<Vec, double>> classes;
      double sd = 0.35 * delta * scale;
      Vec dir = base_dir;
      for (int i = 0; i < d; ++i) dir[i] += sd * N(rng);
      classes.emplace_back(unit(dir), T.facet_offset * std::exp(0.5 * delta * scale * N(rng)));
      int extras = static_cast<int>(U(rng) * 3.0);  // 0..2 extra facet classes
      for (int e = 0; e < extras; ++e) {
        Vec ed(d);
        for (int i = 0; i < d; ++i) ed[i] = N(rng);
        ed = unit(ed);
        double support_here = Tview.support(ed);
        double off = support_here * (1.0 - 0.4 * delta * scale * U(rng));
        classes.emplace_back(ed, std::max(off, 0.1));
      }
      try {
        FacetPolytope fp = make_orbit_facets(G, classes);
        ConvexBody body = ConvexBody::from_facets(fp);
        double norm = max_frame ? body.max_support() : body.min_support();
        body = body.scaled(1.0 / norm);
        dist = hausdorff(body.view(), Tview, grid);
        if (dist > delta || dist <= 1e-12) continue;  // outside the neighborhood or exactly T
        cand = std::move(body);
        built = true;
      } catch (const Error&) {
        continue;  // unbounded or degenerate proposal; shrink and retry
      }
    }
    if (!built) {
      ++rep.skipped_exact;
      continue;
    }
    double v = value_of(cand);
    // Lemma 7.3 flips the inequality for p > 0 (T is the strict local min).
    double margin = (functional == LocalFunctional::Vpf && p > 0.0) ? v - vT : vT - v;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin <= 0.0) {
      ++rep.violations;
      std::ostringstream os;
      os << "sample beats T (margin " << margin << ", trial " << t << "); offending body:";
      for (std::size_t i = 0; i < cand.facets().normals.size(); ++i) {
        os << " [";
        for (int j = 0; j < d; ++j) os << cand.facets().normals[i][j] << (j + 1 < d ? "," : "");
        os << "]@" << cand.facets().offsets[i];
      }
      fail(ErrorCode::SampleViolation, os.str());
    }
  }
  return rep;
}

}  // namespace minklab
