#include "minklab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "minklab/errors.hpp"

namespace minklab {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_m.
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(m), 0.0);
  w.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(m - 1 - i)] = z;
    double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(m - 1 - i)] = wi;
  }
}

}  // namespace

double SphereGrid::total_weight() const { return pairwise_sum(weights); }

double SphereGrid::spacing() const {
  // Area-per-node heuristic: cell diameter ~ 2 sqrt(area/pi) on S^2,
  // arc length on S^1.
  if (n == 1) return 2.0 * kPi / static_cast<double>(size());
  return 2.0 * std::sqrt(total_weight() / (kPi * static_cast<double>(size())));
}

SphereGrid s1_grid(int m) {
  if (m < 8) fail(ErrorCode::ConfigInvalid, "s1_grid requires m >= 8");
  SphereGrid g;
  g.n = 1;
  g.nodes.reserve(static_cast<std::size_t>(m));
  const double w = 2.0 * kPi / m;
  for (int i = 0; i < m; ++i) {
    g.nodes.push_back(s1_point(w * i));
    g.weights.push_back(w);
  }
  return g;
}

SphereGrid s2_grid(int level) {
  if (level < 1) fail(ErrorCode::ConfigInvalid, "s2_grid requires level >= 1");
  const int n_theta = 2 * level;
  const int n_phi = 4 * level;
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  SphereGrid g;
  g.n = 2;
  g.nodes.reserve(static_cast<std::size_t>(n_theta * n_phi));
  const double dphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = x[static_cast<std::size_t>(i)];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double wi = w[static_cast<std::size_t>(i)] * dphi;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = dphi * (j + 0.5);
      g.nodes.push_back(vec3(st * std::cos(phi), st * std::sin(phi), ct));
      g.weights.push_back(wi);
    }
  }
  return g;
}

SphereGrid sphere_grid(int n, int size_hint) {
  if (n == 1) return s1_grid(std::max(8, size_hint));
  if (n == 2) {
    int level = std::max(1, static_cast<int>(std::lround(std::sqrt(size_hint / 8.0))));
    return s2_grid(level);
  }
  fail(ErrorCode::ConfigInvalid, "sphere grids exist for n in {1,2}");
}

double integral_fhp(const SphereGrid& grid, const std::function<double(const Vec&)>& f,
                    const std::function<double(const Vec&)>& h, double p) {
  if (p == 0.0) fail(ErrorCode::ConfigInvalid, "integral_fhp requires p != 0");
  std::vector<double> terms(grid.nodes.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    double hv = h(grid.nodes[i]);
    if (!(hv > 0.0)) fail(ErrorCode::NonpositiveSupport, "support must be positive at nodes");
    terms[i] = grid.weights[i] * f(grid.nodes[i]) * std::pow(hv, p);
  }
  return pairwise_sum(terms);
}

double Vq(const SphereGrid& grid, const std::function<double(const Vec&)>& r, double q) {
  if (q == 0.0) fail(ErrorCode::ConfigInvalid, "Vq requires q != 0");
  std::vector<double> terms(grid.nodes.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    double rv = r(grid.nodes[i]);
    if (!(rv > 0.0)) fail(ErrorCode::NonpositiveRadial, "radial must be positive at nodes");
    terms[i] = grid.weights[i] * std::pow(rv, q);
  }
  return pairwise_sum(terms);
}

double integrate(const SphereGrid& grid, const std::function<double(const Vec&)>& g) {
  std::vector<double> terms(grid.nodes.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i)
    terms[i] = grid.weights[i] * g(grid.nodes[i]);
  return pairwise_sum(terms);
}

SimplexRule simplex_rule(int n) {
  SimplexRule r;
  r.n = n;
  if (n == 1) {
    // 5-point Gauss-Legendre mapped to [0,1]; degree 9.
    std::vector<double> x, w;
    gauss_legendre(5, x, w);
    for (int i = 0; i < 5; ++i) {
      r.nodes.push_back({0.5 * (x[static_cast<std::size_t>(i)] + 1.0)});
      r.weights.push_back(0.5 * w[static_cast<std::size_t>(i)]);
    }
    r.degree = 9;
  } else if (n == 2) {
    // 7-point degree-5 rule on the reference triangle.
    const double a1 = 0.0597158717897698, b1 = 0.4701420641051151, w1 = 0.1323941527885062;
    const double a2 = 0.7974269853530873, b2 = 0.1012865073234563, w2 = 0.1259391805448271;
    r.nodes = {{1.0 / 3.0, 1.0 / 3.0}, {a1, b1}, {b1, a1}, {b1, b1}, {a2, b2}, {b2, a2}, {b2, b2}};
    r.weights = {0.225, w1, w1, w1, w2, w2, w2};
    r.degree = 5;
  } else if (n == 3) {
    // Keast degree-4, 14 points, positive weights.
    const double w1 = 0.0734930431163619, a1 = 0.0927352503108912;
    const double w2 = 0.1126879257180162, a2 = 0.3108859192633005;
    const double w3 = 0.0425460207770812, a3 = 0.0455037041256497;
    auto push4 = [&](double a, double w) {
      double b = 1.0 - 3.0 * a;
      r.nodes.push_back({a, a, a});
      r.nodes.push_back({b, a, a});
      r.nodes.push_back({a, b, a});
      r.nodes.push_back({a, a, b});
      for (int i = 0; i < 4; ++i) r.weights.push_back(w);
    };
    push4(a1, w1);
    push4(a2, w2);
    double b3 = 0.5 - a3;
    const double pairs[6][4] = {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1},
                                {0, 1, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 1}};
    for (const auto& pr : pairs) {
      // barycentric (a3,a3,b3,b3) patterns -> reference coordinates drop the
      // first barycentric coordinate
      double bary[4];
      for (int i = 0; i < 4; ++i) bary[i] = pr[i] > 0.5 ? a3 : b3;
      r.nodes.push_back({bary[1], bary[2], bary[3]});
      r.weights.push_back(w3);
    }
    r.degree = 4;
  } else {
    fail(ErrorCode::ConfigInvalid, "simplex rules exist for n in {1,2,3}");
  }
  return r;
}

double simplex_apply(const std::vector<Vec>& simplex,
                     const std::function<double(const Vec&)>& integrand,
                     const SimplexRule& rule) {
  const int n = rule.n;
  Mat edges(n, n);
  for (int i = 0; i < n; ++i) edges.col(i) = simplex[static_cast<std::size_t>(i + 1)] - simplex[0];
  double vol = std::abs(edges.determinant());
  for (int i = 2; i <= n; ++i) vol /= static_cast<double>(i);
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    Vec x = simplex[0];
    for (int i = 0; i < n; ++i) x += rule.nodes[k][static_cast<std::size_t>(i)] * edges.col(i);
    terms[k] = rule.weights[k] * integrand(x);
  }
  return vol * pairwise_sum(terms);
}

namespace {

// Uniform refinement of a simplex into 2^n children (edge midpoint scheme;
// the standard red refinement for triangles and tetrahedra).
std::vector<std::vector<Vec>> refine_simplex(const std::vector<Vec>& s, int n) {
  std::vector<std::vector<Vec>> out;
  if (n == 1) {
    Vec m = 0.5 * (s[0] + s[1]);
    out.push_back({s[0], m});
    out.push_back({m, s[1]});
  } else if (n == 2) {
    Vec m01 = 0.5 * (s[0] + s[1]), m02 = 0.5 * (s[0] + s[2]), m12 = 0.5 * (s[1] + s[2]);
    out.push_back({s[0], m01, m02});
    out.push_back({m01, s[1], m12});
    out.push_back({m02, m12, s[2]});
    out.push_back({m01, m12, m02});
  } else {
    // Bey's red refinement of a tetrahedron: 4 corner cells + 4 from the
    // inner octahedron split along the m01-m23 diagonal.
    Vec m01 = 0.5 * (s[0] + s[1]), m02 = 0.5 * (s[0] + s[2]), m03 = 0.5 * (s[0] + s[3]);
    Vec m12 = 0.5 * (s[1] + s[2]), m13 = 0.5 * (s[1] + s[3]), m23 = 0.5 * (s[2] + s[3]);
    out.push_back({s[0], m01, m02, m03});
    out.push_back({m01, s[1], m12, m13});
    out.push_back({m02, m12, s[2], m23});
    out.push_back({m03, m13, m23, s[3]});
    out.push_back({m01, m02, m03, m13});
    out.push_back({m01, m02, m12, m13});
    out.push_back({m02, m03, m13, m23});
    out.push_back({m02, m12, m13, m23});
  }
  return out;
}

}  // namespace

double simplex_integrate(const std::vector<Vec>& simplex,
                         const std::function<double(const Vec&)>& integrand,
                         const SimplexRule& rule, double rel_tol, int max_level) {
  const int n = rule.n;
  if (static_cast<int>(simplex.size()) != n + 1)
    fail(ErrorCode::ConfigInvalid, "simplex vertex count does not match the rule dimension");
  {
    Mat edges(n, n);
    for (int i = 0; i < n; ++i) edges.col(i) = simplex[static_cast<std::size_t>(i + 1)] - simplex[0];
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, edges.col(i).norm());
    double vol = std::abs(edges.determinant());
    if (scale <= 0.0 || vol <= 1e-14 * std::pow(scale, n))
      fail(ErrorCode::DegenerateSimplex, "degenerate integration simplex");
  }
  std::vector<std::vector<Vec>> cells = {simplex};
  double prev = 0.0;
  for (int level = 0; level <= max_level; ++level) {
    std::vector<double> terms(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) terms[i] = simplex_apply(cells[i], integrand, rule);
    double total = pairwise_sum(terms);
    if (level > 0) {
      double denom = std::max({std::abs(total), std::abs(prev), 1e-300});
      if (std::abs(total - prev) <= rel_tol * denom || std::abs(total - prev) < 1e-15)
        return total;
    }
    prev = total;
    if (level == max_level) break;
    std::vector<std::vector<Vec>> next;
    next.reserve(cells.size() * (1u << n));
    for (const auto& c : cells)
      for (auto& child : refine_simplex(c, n)) next.push_back(std::move(child));
    cells = std::move(next);
  }
  return prev;
}

}  // namespace minklab
