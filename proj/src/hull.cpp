#include "minklab/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <tuple>
#include <vector>

#include <Eigen/SVD>

#include "minklab/errors.hpp"

namespace minklab {
namespace {

using LVec = std::array<long double, 4>;

struct Plane {
  LVec normal{};  // unit (long double)
  long double offset = 0.0L;
};

long double ldist(const Plane& pl, const Vec& p, int d) {
  long double s = -pl.offset;
  for (int i = 0; i < d; ++i) s += pl.normal[static_cast<std::size_t>(i)] * static_cast<long double>(p[i]);
  return s;
}

// Generalized cross product of d-1 edge vectors in R^d, long double.
// Returns the (unnormalized) facet normal; its norm is (d-1)! times the
// (d-1)-volume of the simplex spanned by the edges.
LVec generalized_cross(const std::vector<LVec>& e, int d) {
  LVec n{};
  if (d == 2) {
    n[0] = e[0][1];
    n[1] = -e[0][0];
  } else if (d == 3) {
    n[0] = e[0][1] * e[1][2] - e[0][2] * e[1][1];
    n[1] = e[0][2] * e[1][0] - e[0][0] * e[1][2];
    n[2] = e[0][0] * e[1][1] - e[0][1] * e[1][0];
  } else {
    // Cofactor expansion over columns of the 3x4 edge matrix.
    for (int j = 0; j < 4; ++j) {
      int c[3], k = 0;
      for (int i = 0; i < 4; ++i)
        if (i != j) c[k++] = i;
      long double det = e[0][c[0]] * (e[1][c[1]] * e[2][c[2]] - e[1][c[2]] * e[2][c[1]]) -
                        e[0][c[1]] * (e[1][c[0]] * e[2][c[2]] - e[1][c[2]] * e[2][c[0]]) +
                        e[0][c[2]] * (e[1][c[0]] * e[2][c[1]] - e[1][c[1]] * e[2][c[0]]);
      n[static_cast<std::size_t>(j)] = ((j % 2) == 0 ? det : -det);
    }
  }
  return n;
}

struct Facet {
  std::array<int, 4> v{};        // vertex indices, d used
  std::array<int, 4> neigh{};    // neighbor across the ridge opposite v[i]
  Plane plane;
  std::vector<int> outside;      // conflict list
  double far_dist = 0.0;
  int far_pt = -1;
  bool alive = true;
};

class Builder {
 public:
  Builder(const std::vector<Vec>& pts, const HullOptions& opts) : opts_(opts) {
    d_ = static_cast<int>(pts[0].size());
    scale_ = 1.0;
    for (const Vec& p : pts) scale_ = std::max(scale_, p.lpNorm<Eigen::Infinity>());
    dedup(pts);
  }

  Hull run() {
    if (static_cast<int>(pts_.size()) < d_ + 1 || initial_simplex() < d_)
      fail(ErrorCode::DegenerateHull, "points do not span the ambient dimension");
    assign_initial_conflicts();
    process();
    return extract();
  }

 private:
  void dedup(const std::vector<Vec>& pts) {
    std::vector<int> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      for (int i = 0; i < d_; ++i) {
        if (pts[static_cast<std::size_t>(a)][i] != pts[static_cast<std::size_t>(b)][i])
          return pts[static_cast<std::size_t>(a)][i] < pts[static_cast<std::size_t>(b)][i];
      }
      return a < b;
    });
    const double tol = opts_.merge_tol * std::max(1.0, scale_);
    for (int idx : order) {
      const Vec& p = pts[static_cast<std::size_t>(idx)];
      bool dup = false;
      for (auto it = pts_.rbegin(); it != pts_.rend(); ++it) {
        if (p[0] - (*it)[0] > tol) break;  // sorted window exhausted
        if ((p - *it).lpNorm<Eigen::Infinity>() <= tol) {
          dup = true;
          break;
        }
      }
      if (!dup) {
        pts_.push_back(p);
        source_.push_back(idx);
      }
    }
  }

  // Greedy affinely-independent seed set; returns the achieved affine rank.
  int initial_simplex() {
    const int N = static_cast<int>(pts_.size());
    int c_best = 0;
    double ext_best = -1.0;
    int lo = 0, hi = 0;
    for (int c = 0; c < d_; ++c) {
      int cl = 0, ch = 0;
      for (int i = 1; i < N; ++i) {
        if (pts_[static_cast<std::size_t>(i)][c] < pts_[static_cast<std::size_t>(cl)][c]) cl = i;
        if (pts_[static_cast<std::size_t>(i)][c] > pts_[static_cast<std::size_t>(ch)][c]) ch = i;
      }
      double ext = pts_[static_cast<std::size_t>(ch)][c] - pts_[static_cast<std::size_t>(cl)][c];
      if (ext > ext_best) {
        ext_best = ext;
        c_best = c;
        lo = cl;
        hi = ch;
      }
    }
    (void)c_best;
    if (ext_best <= opts_.merge_tol * std::max(1.0, scale_)) return 0;
    std::vector<int> seed = {lo, hi};
    Mat Q(d_, d_);
    Q.col(0) = (pts_[static_cast<std::size_t>(hi)] - pts_[static_cast<std::size_t>(lo)]).normalized();
    int rank = 1;
    while (rank < d_) {
      int best = -1;
      double best_res = opts_.merge_tol * std::max(1.0, scale_);
      Vec best_dir;
      for (int i = 0; i < N; ++i) {
        Vec r = pts_[static_cast<std::size_t>(i)] - pts_[static_cast<std::size_t>(lo)];
        r -= Q.leftCols(rank) * (Q.leftCols(rank).transpose() * r);
        double nr = r.norm();
        if (nr > best_res) {
          best_res = nr;
          best = i;
          best_dir = r / nr;
        }
      }
      if (best < 0) return rank;
      seed.push_back(best);
      Q.col(rank) = best_dir;
      ++rank;
    }
    interior_ = Vec::Zero(d_);
    for (int s : seed) interior_ += pts_[static_cast<std::size_t>(s)];
    interior_ /= static_cast<double>(seed.size());
    // d+1 facets of the seed simplex: omit one seed vertex each.
    for (int skip = 0; skip <= d_; ++skip) {
      Facet f;
      int k = 0;
      for (int i = 0; i <= d_; ++i)
        if (i != skip) f.v[static_cast<std::size_t>(k++)] = seed[static_cast<std::size_t>(i)];
      f.plane = facet_plane(f);
      facets_.push_back(std::move(f));
    }
    // Neighbor across the ridge opposite local vertex i: the facet omitting
    // that vertex. With facets indexed by the skipped seed vertex, facet s is
    // adjacent to every other facet; match ridges explicitly.
    for (int a = 0; a <= d_; ++a) {
      for (int i = 0; i < d_; ++i) {
        // ridge of facet a omitting its local vertex i.
        std::vector<int> ridge;
        for (int j = 0; j < d_; ++j)
          if (j != i) ridge.push_back(facets_[static_cast<std::size_t>(a)].v[static_cast<std::size_t>(j)]);
        for (int b = 0; b <= d_; ++b) {
          if (b == a) continue;
          if (contains_all(facets_[static_cast<std::size_t>(b)], ridge)) {
            facets_[static_cast<std::size_t>(a)].neigh[static_cast<std::size_t>(i)] = b;
            break;
          }
        }
      }
    }
    return d_;
  }

  bool contains_all(const Facet& f, const std::vector<int>& ridge) const {
    for (int r : ridge) {
      bool found = false;
      for (int j = 0; j < d_; ++j)
        if (f.v[static_cast<std::size_t>(j)] == r) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  }

  Plane facet_plane(const Facet& f) const {
    std::vector<LVec> edges(static_cast<std::size_t>(d_ - 1));
    const Vec& v0 = pts_[static_cast<std::size_t>(f.v[0])];
    for (int i = 1; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        edges[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] =
            static_cast<long double>(pts_[static_cast<std::size_t>(f.v[static_cast<std::size_t>(i)])][j]) -
            static_cast<long double>(v0[j]);
    LVec n = generalized_cross(edges, d_);
    long double norm = 0.0L;
    for (int j = 0; j < d_; ++j) norm += n[static_cast<std::size_t>(j)] * n[static_cast<std::size_t>(j)];
    norm = std::sqrt(norm);
    if (norm <= 0.0L) return Plane{};  // degenerate; caller checks
    Plane pl;
    long double off = 0.0L;
    for (int j = 0; j < d_; ++j) {
      pl.normal[static_cast<std::size_t>(j)] = n[static_cast<std::size_t>(j)] / norm;
      off += pl.normal[static_cast<std::size_t>(j)] * static_cast<long double>(v0[j]);
    }
    pl.offset = off;
    if (interior_.size() == d_ && ldist(pl, interior_, d_) > 0.0L) {
      for (int j = 0; j < d_; ++j) pl.normal[static_cast<std::size_t>(j)] = -pl.normal[static_cast<std::size_t>(j)];
      pl.offset = -pl.offset;
    }
    return pl;
  }

  bool plane_degenerate(const Facet& f) const {
    long double n2 = 0.0L;
    for (int j = 0; j < d_; ++j)
      n2 += f.plane.normal[static_cast<std::size_t>(j)] * f.plane.normal[static_cast<std::size_t>(j)];
    return n2 < 0.5L;  // facet_plane leaves a zero normal when degenerate
  }

  void push_conflict(int fi, int pi) {
    Facet& f = facets_[static_cast<std::size_t>(fi)];
    double dist = static_cast<double>(ldist(f.plane, pts_[static_cast<std::size_t>(pi)], d_));
    if (dist > outside_tol()) {
      f.outside.push_back(pi);
      if (dist > f.far_dist) {
        f.far_dist = dist;
        f.far_pt = pi;
      }
    }
  }

  double outside_tol() const { return opts_.merge_tol * std::max(1.0, scale_); }
  double vis_tol() const { return 0.1 * opts_.merge_tol * std::max(1.0, scale_); }

  void assign_initial_conflicts() {
    for (int pi = 0; pi < static_cast<int>(pts_.size()); ++pi) {
      for (int fi = 0; fi < static_cast<int>(facets_.size()); ++fi) {
        std::size_t before = facets_[static_cast<std::size_t>(fi)].outside.size();
        push_conflict(fi, pi);
        if (facets_[static_cast<std::size_t>(fi)].outside.size() > before) break;
      }
    }
    for (int fi = 0; fi < static_cast<int>(facets_.size()); ++fi) requeue(fi);
  }

  void requeue(int fi) {
    const Facet& f = facets_[static_cast<std::size_t>(fi)];
    if (f.alive && f.far_pt >= 0) heap_.emplace(f.far_dist, fi, f.far_pt);
  }

  void process() {
    while (!heap_.empty()) {
      auto [dist, fi, pi] = heap_.top();
      heap_.pop();
      Facet& f = facets_[static_cast<std::size_t>(fi)];
      if (!f.alive || f.far_pt != pi || f.far_dist != dist) continue;  // stale
      insert_apex(fi, pi);
    }
  }

  void insert_apex(int start_facet, int apex) {
    const Vec& ap = pts_[static_cast<std::size_t>(apex)];
    // Visible set by BFS over neighbors.
    std::vector<int> visible;
    std::vector<char> in_visible(facets_.size(), 0);
    std::vector<int> stack = {start_facet};
    in_visible[static_cast<std::size_t>(start_facet)] = 1;
    auto expand = [&](int fid) {
      stack.push_back(fid);
      in_visible[static_cast<std::size_t>(fid)] = 1;
    };
    while (!stack.empty()) {
      int fid = stack.back();
      stack.pop_back();
      visible.push_back(fid);
      for (int i = 0; i < d_; ++i) {
        int nb = facets_[static_cast<std::size_t>(fid)].neigh[static_cast<std::size_t>(i)];
        if (in_visible[static_cast<std::size_t>(nb)]) continue;
        if (static_cast<double>(ldist(facets_[static_cast<std::size_t>(nb)].plane, ap, d_)) > vis_tol())
          expand(nb);
      }
    }

    // Horizon ridges; promote facets across degenerate ridges and recompute.
    struct HorizonEdge {
      int visible_f;
      int invisible_f;
      std::vector<int> ridge;
    };
    std::vector<HorizonEdge> horizon;
    int promotions = 0;
    for (;;) {
      horizon.clear();
      bool promoted = false;
      for (int fid : visible) {
        const Facet& f = facets_[static_cast<std::size_t>(fid)];
        for (int i = 0; i < d_; ++i) {
          int nb = f.neigh[static_cast<std::size_t>(i)];
          if (in_visible[static_cast<std::size_t>(nb)]) continue;
          std::vector<int> ridge;
          for (int j = 0; j < d_; ++j)
            if (j != i) ridge.push_back(f.v[static_cast<std::size_t>(j)]);
          // Degenerate cone test: apex affinely dependent with the ridge.
          Facet trial;
          for (int j = 0; j < d_ - 1; ++j) trial.v[static_cast<std::size_t>(j)] = ridge[static_cast<std::size_t>(j)];
          trial.v[static_cast<std::size_t>(d_ - 1)] = apex;
          trial.plane = facet_plane(trial);
          if (plane_degenerate(trial)) {
            if (!in_visible[static_cast<std::size_t>(nb)]) {
              expand(nb);
              visible.push_back(nb);
              promoted = true;
              ++promotions;
            }
            break;
          }
          horizon.push_back({fid, nb, std::move(ridge)});
        }
        if (promoted) break;
      }
      if (!promoted) break;
      if (promotions > static_cast<int>(facets_.size()))
        fail(ErrorCode::NumericalFailure, "hull horizon did not stabilize");
    }
    if (horizon.empty()) fail(ErrorCode::NumericalFailure, "empty horizon during hull insertion");

    // Gather orphaned conflict points.
    std::vector<int> orphans;
    for (int fid : visible) {
      Facet& f = facets_[static_cast<std::size_t>(fid)];
      f.alive = false;
      for (int pi : f.outside)
        if (pi != apex) orphans.push_back(pi);
      f.outside.clear();
      f.far_pt = -1;
      f.far_dist = 0.0;
    }

    // Build the new cone facets.
    std::map<std::vector<int>, std::pair<int, int>> ridge_map;  // apex-ridge -> (facet, slot)
    std::vector<int> created;
    for (const HorizonEdge& he : horizon) {
      Facet nf;
      for (int j = 0; j < d_ - 1; ++j) nf.v[static_cast<std::size_t>(j)] = he.ridge[static_cast<std::size_t>(j)];
      nf.v[static_cast<std::size_t>(d_ - 1)] = apex;
      nf.plane = facet_plane(nf);
      nf.neigh.fill(-1);
      // Slot d-1 is opposite the apex -> ridge shared with the old facet.
      nf.neigh[static_cast<std::size_t>(d_ - 1)] = he.invisible_f;
      int nid = static_cast<int>(facets_.size());
      facets_.push_back(std::move(nf));
      in_visible.push_back(0);
      created.push_back(nid);
      // Patch the invisible neighbor's pointer (it pointed at a dead facet).
      Facet& inv = facets_[static_cast<std::size_t>(he.invisible_f)];
      for (int i = 0; i < d_; ++i)
        if (inv.neigh[static_cast<std::size_t>(i)] == he.visible_f) inv.neigh[static_cast<std::size_t>(i)] = nid;
      // Apex-containing ridges for new-new adjacency.
      for (int i = 0; i < d_ - 1; ++i) {
        std::vector<int> key;
        for (int j = 0; j < d_; ++j)
          if (j != i) key.push_back(facets_[static_cast<std::size_t>(nid)].v[static_cast<std::size_t>(j)]);
        std::sort(key.begin(), key.end());
        auto it = ridge_map.find(key);
        if (it == ridge_map.end()) {
          ridge_map[key] = {nid, i};
        } else {
          facets_[static_cast<std::size_t>(nid)].neigh[static_cast<std::size_t>(i)] = it->second.first;
          facets_[static_cast<std::size_t>(it->second.first)].neigh[static_cast<std::size_t>(it->second.second)] = nid;
          ridge_map.erase(it);
        }
      }
    }
    if (!ridge_map.empty()) fail(ErrorCode::NumericalFailure, "unmatched hull ridge");

    // Redistribute orphans.
    std::sort(orphans.begin(), orphans.end());
    orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());
    for (int pi : orphans) {
      for (int fid : created) {
        std::size_t before = facets_[static_cast<std::size_t>(fid)].outside.size();
        push_conflict(fid, pi);
        if (facets_[static_cast<std::size_t>(fid)].outside.size() > before) break;
      }
    }
    for (int fid : created) requeue(fid);
  }

  double simplex_facet_area(const Facet& f) const {
    Mat E(d_, d_ - 1);
    const Vec& v0 = pts_[static_cast<std::size_t>(f.v[0])];
    for (int i = 1; i < d_; ++i) E.col(i - 1) = pts_[static_cast<std::size_t>(f.v[static_cast<std::size_t>(i)])] - v0;
    Mat G = E.transpose() * E;
    double det = G.determinant();
    if (det <= 0.0) return 0.0;
    double fact = 1.0;
    for (int i = 2; i < d_; ++i) fact *= static_cast<double>(i);
    return std::sqrt(det) / fact;
  }

  Hull extract() {
    Hull out;
    out.dim = d_;
    std::vector<int> alive;
    for (int i = 0; i < static_cast<int>(facets_.size()); ++i)
      if (facets_[static_cast<std::size_t>(i)].alive) alive.push_back(i);

    // Merge coplanar simplicial facets: lexicographic sort on the plane.
    std::sort(alive.begin(), alive.end(), [&](int a, int b) {
      const Plane& pa = facets_[static_cast<std::size_t>(a)].plane;
      const Plane& pb = facets_[static_cast<std::size_t>(b)].plane;
      for (int j = 0; j < d_; ++j) {
        if (pa.normal[static_cast<std::size_t>(j)] != pb.normal[static_cast<std::size_t>(j)])
          return pa.normal[static_cast<std::size_t>(j)] < pb.normal[static_cast<std::size_t>(j)];
      }
      return pa.offset < pb.offset;
    });
    const double tol = opts_.merge_tol;
    std::vector<std::vector<int>> groups;
    for (int fid : alive) {
      const Plane& pl = facets_[static_cast<std::size_t>(fid)].plane;
      bool merged = false;
      if (!groups.empty()) {
        const Plane& rep = facets_[static_cast<std::size_t>(groups.back().front())].plane;
        long double dn = 0.0L;
        for (int j = 0; j < d_; ++j)
          dn = std::max(dn, std::abs(pl.normal[static_cast<std::size_t>(j)] - rep.normal[static_cast<std::size_t>(j)]));
        if (static_cast<double>(dn) <= tol &&
            std::abs(static_cast<double>(pl.offset - rep.offset)) <= tol * std::max(1.0, scale_)) {
          groups.back().push_back(fid);
          merged = true;
        }
      }
      if (!merged) groups.push_back({fid});
    }

    std::vector<int> vertex_of(pts_.size(), -1);
    double vol = 0.0;
    std::vector<double> vol_terms;
    for (const std::vector<int>& g : groups) {
      HullFacet hf;
      const Plane& pl = facets_[static_cast<std::size_t>(g.front())].plane;
      hf.normal = Vec(d_);
      for (int j = 0; j < d_; ++j) hf.normal[j] = static_cast<double>(pl.normal[static_cast<std::size_t>(j)]);
      hf.offset = static_cast<double>(pl.offset);
      std::vector<int> vset;
      double area = 0.0;
      for (int fid : g) {
        const Facet& f = facets_[static_cast<std::size_t>(fid)];
        area += simplex_facet_area(f);
        for (int j = 0; j < d_; ++j) vset.push_back(f.v[static_cast<std::size_t>(j)]);
      }
      std::sort(vset.begin(), vset.end());
      vset.erase(std::unique(vset.begin(), vset.end()), vset.end());
      hf.area = area;
      hf.vertices = std::move(vset);
      double height = hf.offset - hf.normal.dot(interior_);
      vol_terms.push_back(height * area / static_cast<double>(d_));
      out.facets.push_back(std::move(hf));
    }
    vol = pairwise_sum(vol_terms);
    out.volume = vol;

    // Minimal vertex list: incident merged normals must span R^d.
    std::vector<std::vector<int>> incident(pts_.size());
    for (int gi = 0; gi < static_cast<int>(out.facets.size()); ++gi)
      for (int vi : out.facets[static_cast<std::size_t>(gi)].vertices)
        incident[static_cast<std::size_t>(vi)].push_back(gi);
    for (int vi = 0; vi < static_cast<int>(pts_.size()); ++vi) {
      const auto& inc = incident[static_cast<std::size_t>(vi)];
      if (static_cast<int>(inc.size()) < d_) continue;
      Mat N(static_cast<int>(inc.size()), d_);
      for (int r = 0; r < static_cast<int>(inc.size()); ++r)
        N.row(r) = out.facets[static_cast<std::size_t>(inc[static_cast<std::size_t>(r)])].normal.transpose();
      Eigen::JacobiSVD<Mat> svd(N);
      if (svd.singularValues()[d_ - 1] > 1e-6) {
        vertex_of[static_cast<std::size_t>(vi)] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(pts_[static_cast<std::size_t>(vi)]);
        out.vertex_source.push_back(source_[static_cast<std::size_t>(vi)]);
      }
    }
    for (HullFacet& hf : out.facets) {
      std::vector<int> mapped;
      for (int vi : hf.vertices)
        if (vertex_of[static_cast<std::size_t>(vi)] >= 0) mapped.push_back(vertex_of[static_cast<std::size_t>(vi)]);
      hf.vertices = std::move(mapped);
    }
    return out;
  }

  HullOptions opts_;
  int d_ = 0;
  double scale_ = 1.0;
  std::vector<Vec> pts_;
  std::vector<int> source_;
  Vec interior_;
  std::vector<Facet> facets_;
  std::priority_queue<std::tuple<double, int, int>> heap_;
};

}  // namespace

int hull_affine_rank(const std::vector<Vec>& pts, double tol) { return affine_rank(pts, tol); }

Hull convex_hull(const std::vector<Vec>& pts, const HullOptions& opts) {
  if (pts.empty()) fail(ErrorCode::DegenerateHull, "empty point set");
  int d = static_cast<int>(pts[0].size());
  if (d < 2 || d > 4) fail(ErrorCode::DegenerateHull, "hull supports dimensions 2..4");
  Builder b(pts, opts);
  return b.run();
}

}  // namespace minklab
