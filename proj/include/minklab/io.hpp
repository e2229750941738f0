#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "minklab/bodies.hpp"
#include "minklab/optimize.hpp"
#include "minklab/planar.hpp"
#include "minklab/quadrature.hpp"

namespace minklab {

using Json = nlohmann::json;

/// Stable formatting for floating-point output: shortest round-trip-exact
/// representation, used by every CSV/JSON writer (byte-identical reruns).
std::string format_double(double v);

Json matrix_to_json(const Mat& m);  // row-major nested array
Json group_to_json(const SymmetryGroup& g);

Json facets_to_json(const FacetPolytope& p);
Json vertices_to_json(const VertexPolytope& p);
FacetPolytope facets_from_json(const Json& j);
VertexPolytope vertices_from_json(const Json& j);

/// OFF for dim 3, nOFF otherwise.
std::string to_off(const ConvexBody& body);

Json grid_to_json(const SphereGrid& g);

Json maximizer_to_json(const MaximizerResult& r);
std::string trace_to_csv(const std::vector<TraceRow>& trace);
std::string planar_to_csv(const std::vector<PlanarContinuationStep>& steps);

/// FNV-1a 64-bit; stable across runs and platforms for identical bytes.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, checksum
  Json to_json() const;
};

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace minklab
