#include "minklab/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minklab/errors.hpp"
#include "minklab/quadrature.hpp"

namespace minklab {

namespace {

constexpr double kGeomTol = 1e-9;

void check_facets(const FacetPolytope& p) {
  if (p.normals.size() != p.offsets.size() || p.normals.empty())
    fail(ErrorCode::ConfigInvalid, "facet polytope needs matching normals/offsets");
  for (std::size_t i = 0; i < p.normals.size(); ++i) {
    if (std::abs(p.normals[i].norm() - 1.0) > 1e-9)
      fail(ErrorCode::ConfigInvalid, "facet normals must be unit vectors");
    if (!(p.offsets[i] > 0.0))
      fail(ErrorCode::OriginNotInterior, "facet offsets must be positive (origin interior)");
  }
}

}  // namespace

ConvexBody ConvexBody::from_vertices(const VertexPolytope& p) {
  if (p.vertices.empty()) fail(ErrorCode::DegenerateHull, "empty vertex list");
  ConvexBody b;
  b.dim_ = p.dim > 0 ? p.dim : static_cast<int>(p.vertices.front().size());
  if (hull_affine_rank(p.vertices) < b.dim_)
    fail(ErrorCode::DegenerateHull, "vertex polytope is not full-dimensional");
  Hull h = convex_hull(p.vertices);
  b.vertices_.dim = b.dim_;
  b.vertices_.vertices = h.vertices;
  b.facets_.dim = b.dim_;
  b.volume_ = h.volume;
  for (const HullFacet& f : h.facets) {
    if (f.offset <= kGeomTol)
      fail(ErrorCode::OriginNotInterior, "origin is not interior to the polytope");
    b.facets_.normals.push_back(f.normal);
    b.facets_.offsets.push_back(f.offset);
    b.areas_.push_back(f.area);
  }
  return b;
}

ConvexBody ConvexBody::from_facets(const FacetPolytope& p) {
  check_facets(p);
  const int d = p.dim > 0 ? p.dim : static_cast<int>(p.normals.front().size());
  // Vertices via the polar: vertex v_j of the intersection corresponds to a
  // facet (m_j, g_j) of conv{n_i / h_i}, v_j = m_j / g_j. A facet i is
  // irredundant iff its polar point survives as a hull vertex.
  std::vector<Vec> polar_pts;
  polar_pts.reserve(p.normals.size());
  for (std::size_t i = 0; i < p.normals.size(); ++i) polar_pts.push_back(p.normals[i] / p.offsets[i]);
  if (hull_affine_rank(polar_pts) < d)
    fail(ErrorCode::Unbounded, "facet normals do not positively span (unbounded intersection)");
  Hull ph = convex_hull(polar_pts);
  for (const HullFacet& f : ph.facets)
    if (f.offset <= kGeomTol)
      fail(ErrorCode::Unbounded, "facet normals do not positively span (unbounded intersection)");
  VertexPolytope verts;
  verts.dim = d;
  for (const HullFacet& f : ph.facets) verts.vertices.push_back(f.normal / f.offset);
  ConvexBody b = from_vertices(verts);
  // Record which input facets were pruned as redundant.
  std::vector<char> survived(p.normals.size(), 0);
  for (int src : ph.vertex_source) survived[static_cast<std::size_t>(src)] = 1;
  for (std::size_t i = 0; i < survived.size(); ++i)
    if (!survived[i]) b.pruned_.push_back(static_cast<int>(i));
  return b;
}

double ConvexBody::support(const Vec& x) const {
  double best = -std::numeric_limits<double>::max();
  for (const Vec& v : vertices_.vertices) best = std::max(best, v.dot(x));
  return best;
}

double ConvexBody::radial(const Vec& y) const {
  double best = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < facets_.normals.size(); ++i) {
    double denom = facets_.normals[i].dot(y);
    if (denom > 1e-14) best = std::min(best, facets_.offsets[i] / denom);
  }
  return best;
}

double ConvexBody::min_support() const {
  double m = std::numeric_limits<double>::max();
  for (double h : facets_.offsets) m = std::min(m, h);
  return m;
}

double ConvexBody::max_support() const {
  double m = 0.0;
  for (const Vec& v : vertices_.vertices) m = std::max(m, v.norm());
  return m;
}

ConvexBody ConvexBody::scaled(double mu) const {
  if (!(mu > 0.0)) fail(ErrorCode::ConfigInvalid, "scale factor must be positive");
  ConvexBody b = *this;
  for (Vec& v : b.vertices_.vertices) v *= mu;
  for (double& h : b.facets_.offsets) h *= mu;
  for (double& a : b.areas_) a *= std::pow(mu, dim_ - 1);
  b.volume_ *= std::pow(mu, dim_);
  return b;
}

BodyView ConvexBody::view() const {
  BodyView v;
  v.dim = dim_;
  v.source = BodySource::FacetList;
  // Copy the geometry so the view stays valid independently of the body.
  auto verts = vertices_.vertices;
  auto normals = facets_.normals;
  auto offsets = facets_.offsets;
  v.support = [verts](const Vec& x) {
    double best = -std::numeric_limits<double>::max();
    for (const Vec& p : verts) best = std::max(best, p.dot(x));
    return best;
  };
  v.radial = [normals, offsets](const Vec& y) {
    double best = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < normals.size(); ++i) {
      double denom = normals[i].dot(y);
      if (denom > 1e-14) best = std::min(best, offsets[i] / denom);
    }
    return best;
  };
  return v;
}

VertexPolytope dualize(const FacetPolytope& p) {
  return ConvexBody::from_facets(p).vertices();
}

FacetPolytope dualize(const VertexPolytope& p) {
  return ConvexBody::from_vertices(p).facets();
}

ConvexBody polar(const ConvexBody& body) {
  VertexPolytope vp;
  vp.dim = body.dim();
  const FacetPolytope& f = body.facets();
  for (std::size_t i = 0; i < f.normals.size(); ++i) vp.vertices.push_back(f.normals[i] / f.offsets[i]);
  return ConvexBody::from_vertices(vp);
}

double hausdorff(const BodyView& a, const BodyView& b, const SphereGrid& grid) {
  double worst = 0.0;
  for (const Vec& x : grid.nodes) worst = std::max(worst, std::abs(a.support(x) - b.support(x)));
  return worst;
}

ConvexBody cut_polytope(const BodyView& body, const Vec& x0, const SymmetryGroup& group) {
  if (std::abs(x0.norm() - 1.0) > 1e-9) fail(ErrorCode::ConfigInvalid, "x0 must be a unit vector");
  double h0 = body.support(x0);
  if (!(h0 > 0.0)) fail(ErrorCode::OriginNotInterior, "support at x0 must be positive");
  Orbit orb = orbit(group, x0);
  FacetPolytope fp;
  fp.dim = group.dim;
  for (const Vec& n : orb.points) {
    fp.normals.push_back(n);
    fp.offsets.push_back(h0);
  }
  return ConvexBody::from_facets(fp);  // throws Unbounded if the orbit does not span
}

double invariance_defect(const BodyView& body, const SymmetryGroup& group,
                         const SphereGrid& grid) {
  double worst = 0.0;
  for (const Mat& m : group.elements) {
    Mat mt = m.transpose();
    for (const Vec& x : grid.nodes)
      worst = std::max(worst, std::abs(body.support(mt * x) - body.support(x)));
  }
  return worst;
}

FacetPolytope make_orbit_facets(const SymmetryGroup& group,
                                const std::vector<std::pair<Vec, double>>& classes,
                                std::vector<int>* class_of) {
  FacetPolytope fp;
  fp.dim = group.dim;
  if (class_of) class_of->clear();
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    if (!(classes[ci].second > 0.0))
      fail(ErrorCode::ConfigInvalid, "class offsets must be positive");
    Orbit orb = orbit(group, unit(classes[ci].first));
    for (const Vec& n : orb.points) {
      bool dup = false;
      for (std::size_t j = 0; j < fp.normals.size(); ++j) {
        if ((fp.normals[j] - n).lpNorm<Eigen::Infinity>() <= 1e-9 &&
            std::abs(fp.offsets[j] - classes[ci].second) <= 1e-9) {
          dup = true;
          break;
        }
      }
      if (dup) continue;
      fp.normals.push_back(n);
      fp.offsets.push_back(classes[ci].second);
      if (class_of) class_of->push_back(static_cast<int>(ci));
    }
  }
  return fp;
}

}  // namespace minklab
