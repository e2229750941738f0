#include "minklab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "minklab/errors.hpp"

namespace minklab {

std::string format_double(double v) {
  // %.17g is round-trip exact for doubles and stable across reruns.
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json group_to_json(const SymmetryGroup& g) {
  Json j;
  j["name"] = g.name;
  j["dim"] = g.dim;
  j["order"] = g.order();
  Json elems = Json::array();
  for (const Mat& m : g.elements) elems.push_back(matrix_to_json(m));
  j["elements"] = elems;
  return j;
}

namespace {

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const Json& j) {
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

Json facets_to_json(const FacetPolytope& p) {
  Json j;
  j["dim"] = p.dim;
  Json normals = Json::array(), offsets = Json::array();
  for (const Vec& n : p.normals) normals.push_back(vec_to_json(n));
  for (double h : p.offsets) offsets.push_back(h);
  j["normals"] = normals;
  j["offsets"] = offsets;
  return j;
}

Json vertices_to_json(const VertexPolytope& p) {
  Json j;
  j["dim"] = p.dim;
  Json verts = Json::array();
  for (const Vec& v : p.vertices) verts.push_back(vec_to_json(v));
  j["vertices"] = verts;
  return j;
}

FacetPolytope facets_from_json(const Json& j) {
  FacetPolytope p;
  p.dim = j.at("dim").get<int>();
  for (const Json& n : j.at("normals")) p.normals.push_back(vec_from_json(n));
  for (const Json& h : j.at("offsets")) p.offsets.push_back(h.get<double>());
  return p;
}

VertexPolytope vertices_from_json(const Json& j) {
  VertexPolytope p;
  p.dim = j.at("dim").get<int>();
  for (const Json& v : j.at("vertices")) p.vertices.push_back(vec_from_json(v));
  return p;
}

std::string to_off(const ConvexBody& body) {
  std::ostringstream os;
  const int d = body.dim();
  const auto& verts = body.vertices().vertices;
  const auto& facets = body.facets();
  if (d != 3) os << d << " nOFF\n";
  else os << "OFF\n";
  os << verts.size() << " " << facets.normals.size() << " 0\n";
  for (const Vec& v : verts) {
    for (int i = 0; i < d; ++i) os << format_double(v[i]) << (i + 1 < d ? " " : "\n");
  }
  // Facet vertex lists: vertices on the facet plane, angularly ordered for
  // d = 3 so viewers get consistent polygons.
  for (std::size_t fi = 0; fi < facets.normals.size(); ++fi) {
    std::vector<int> on;
    for (int vi = 0; vi < static_cast<int>(verts.size()); ++vi)
      if (std::abs(facets.normals[fi].dot(verts[static_cast<std::size_t>(vi)]) - facets.offsets[fi]) <= 1e-8)
        on.push_back(vi);
    if (d == 3 && on.size() >= 3) {
      Vec n = facets.normals[fi];
      Vec c = Vec::Zero(3);
      for (int vi : on) c += verts[static_cast<std::size_t>(vi)];
      c /= static_cast<double>(on.size());
      Vec u = (verts[static_cast<std::size_t>(on[0])] - c).normalized();
      Vec w = vec3(n[1] * u[2] - n[2] * u[1], n[2] * u[0] - n[0] * u[2], n[0] * u[1] - n[1] * u[0]);
      std::sort(on.begin(), on.end(), [&](int a, int b) {
        Vec pa = verts[static_cast<std::size_t>(a)] - c, pb = verts[static_cast<std::size_t>(b)] - c;
        return std::atan2(pa.dot(w), pa.dot(u)) < std::atan2(pb.dot(w), pb.dot(u));
      });
    }
    os << on.size();
    for (int vi : on) os << " " << vi;
    os << "\n";
  }
  return os.str();
}

Json grid_to_json(const SphereGrid& g) {
  Json j;
  j["n"] = g.n;
  Json nodes = Json::array(), weights = Json::array();
  for (const Vec& x : g.nodes) nodes.push_back(vec_to_json(x));
  for (double w : g.weights) weights.push_back(w);
  j["nodes"] = nodes;
  j["weights"] = weights;
  return j;
}

Json maximizer_to_json(const MaximizerResult& r) {
  Json j;
  j["p"] = r.p;
  j["q"] = r.q;
  j["group"] = r.group_name;
  j["value"] = r.value.value;
  j["error_est"] = r.value.error;
  j["min_h"] = r.body.min_support();
  j["max_h"] = r.body.max_support();
  j["V"] = r.body.V();
  j["no_improvement"] = r.no_improvement;
  j["interior"] = r.interior;
  j["final_distance"] = r.final_distance;
  Json classes = Json::array();
  for (const OrbitClass& c : r.params.classes) {
    Json jc;
    jc["direction"] = vec_to_json(c.rep_direction);
    jc["offset"] = c.offset;
    classes.push_back(jc);
  }
  j["classes"] = classes;
  j["active_classes"] = r.active_classes;
  j["body"] = facets_to_json(r.body.facets());
  return j;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << "iter,p,q,value,error_est,min_h,hausdorff_to_snap\n";
  for (const TraceRow& r : trace) {
    os << r.iter << "," << format_double(r.p) << "," << format_double(r.q) << ","
       << format_double(r.value) << "," << format_double(r.error_est) << ","
       << format_double(r.min_h) << "," << format_double(r.hausdorff_to_snap) << "\n";
  }
  return os.str();
}

std::string planar_to_csv(const std::vector<PlanarContinuationStep>& steps) {
  std::ostringstream os;
  os << "p,max_h,min_h,dist_to_polygon,residual,newton_iters\n";
  for (const PlanarContinuationStep& s : steps) {
    os << format_double(s.p) << "," << format_double(s.max_h) << "," << format_double(s.min_h)
       << "," << format_double(s.dist_to_polygon) << "," << format_double(s.residual) << ","
       << s.newton_iters << "\n";
  }
  return os.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json RunManifest::to_json() const {
  Json j;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  Json outs = Json::array();
  for (const auto& [path, sum] : outputs) {
    Json o;
    o["path"] = path;
    o["fnv1a64"] = sum;
    outs.push_back(o);
  }
  j["outputs"] = outs;
  return j;
}

void write_file(const std::string& path, const std::string& contents) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ConfigInvalid, "cannot open for writing: " + path);
  out << contents;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigInvalid, "cannot open: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace minklab
