#include "minklab/config.hpp"

#include <map>

#include "minklab/errors.hpp"

namespace minklab {

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::GroupInfo: return "group-info";
    case ExperimentKind::Maximize: return "maximize";
    case ExperimentKind::Continuation: return "continuation";
    case ExperimentKind::Planar: return "planar";
    case ExperimentKind::LocalMax: return "localmax";
    case ExperimentKind::VbarScan: return "vbar-scan";
    case ExperimentKind::DualityCheck: return "duality-check";
  }
  return "?";
}

namespace {

[[noreturn]] void bad_field(const std::string& pointer, const std::string& why) {
  fail(ErrorCode::ConfigInvalid, "config field " + pointer + ": " + why);
}

ExperimentKind kind_from_string(const std::string& s) {
  static const std::map<std::string, ExperimentKind> kinds = {
      {"group-info", ExperimentKind::GroupInfo},   {"maximize", ExperimentKind::Maximize},
      {"continuation", ExperimentKind::Continuation}, {"planar", ExperimentKind::Planar},
      {"localmax", ExperimentKind::LocalMax},      {"vbar-scan", ExperimentKind::VbarScan},
      {"duality-check", ExperimentKind::DualityCheck}};
  auto it = kinds.find(s);
  if (it == kinds.end()) bad_field("/kind", "unknown kind '" + s + "'");
  return it->second;
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    bad_field(std::string("/") + key, "wrong type");
  }
}

std::vector<double> get_schedule(const Json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  const Json& s = j.at(key);
  if (s.is_array()) {
    for (const Json& v : s) out.push_back(v.get<double>());
    return out;
  }
  if (s.is_object()) {
    double start = s.value("start", 0.0);
    double factor = s.value("factor", 2.0);
    int steps = s.value("steps", 0);
    if (steps <= 0) bad_field(std::string("/") + key + "/steps", "must be positive");
    double v = start;
    for (int i = 0; i < steps; ++i) {
      out.push_back(v);
      v *= factor;
    }
    return out;
  }
  bad_field(std::string("/") + key, "expected array or {start,factor,steps}");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::ConfigInvalid, "config root must be an object");
  ExperimentConfig c;
  c.version = get_or(j, "version", kConfigSchemaVersion);
  if (c.version != kConfigSchemaVersion) bad_field("/version", "unsupported schema version");
  if (!j.contains("kind")) bad_field("/kind", "required");
  c.kind = kind_from_string(j.at("kind").get<std::string>());
  c.group_spec = get_or<std::string>(j, "group", "");
  if (j.contains("f")) {
    const Json& f = j.at("f");
    c.f.kind = get_or<std::string>(f, "kind", "constant");
    if (c.f.kind == "constant") {
      c.f.value = get_or(f, "value", 1.0);
      if (!(c.f.value > 0.0)) bad_field("/f/value", "must be positive (c1 <= f <= c2 requires c1 > 0)");
    } else if (c.f.kind == "formula") {
      c.f.expr = get_or<std::string>(f, "expr", "");
      if (c.f.expr.empty()) bad_field("/f/expr", "required for formula densities");
    } else if (c.f.kind == "table") {
      c.f.table_path = get_or<std::string>(f, "path", "");
      if (c.f.table_path.empty()) bad_field("/f/path", "required for tabulated densities");
    } else {
      bad_field("/f/kind", "must be constant | formula | table");
    }
  }
  if (j.contains("p")) c.p = j.at("p").get<double>();
  if (j.contains("q")) c.q = j.at("q").get<double>();
  c.p_schedule = get_schedule(j, "p_schedule");
  c.q_schedule = get_schedule(j, "q_schedule");
  c.k = get_or(j, "k", 4);
  c.polytope = get_or<std::string>(j, "polytope", "");
  c.polytope_n = get_or(j, "polytope_n", 2);
  c.delta = get_or(j, "delta", 0.1);
  c.trials = get_or(j, "trials", 500);
  c.functional = get_or<std::string>(j, "functional", "V");
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    c.s1_nodes = get_or(g, "s1_m", kDefaultS1Nodes);
    c.s2_level = get_or(g, "s2_level", kDefaultS2Level);
  }
  if (j.contains("search_grid")) {
    const Json& g = j.at("search_grid");
    c.search_s1_nodes = get_or(g, "s1_m", 512);
    c.search_s2_level = get_or(g, "s2_level", 16);
  }
  c.classes = get_or(j, "classes", 3);
  c.starts = get_or(j, "starts", 8);
  c.seed = get_or<std::uint64_t>(j, "seed", 20240817ULL);
  c.out_dir = get_or<std::string>(j, "out_dir", "out");

  // Cross-field validation.
  switch (c.kind) {
    case ExperimentKind::GroupInfo:
      if (c.group_spec.empty()) bad_field("/group", "required for group-info");
      break;
    case ExperimentKind::Maximize:
      if (c.group_spec.empty()) bad_field("/group", "required for maximize");
      if (!c.p) bad_field("/p", "required for maximize");
      if (*c.p == 0.0) bad_field("/p", "p must be nonzero");
      if (c.q && *c.q == 0.0) bad_field("/q", "q must be nonzero (dual functional requires q != 0)");
      break;
    case ExperimentKind::Continuation:
      if (c.group_spec.empty()) bad_field("/group", "required for continuation");
      if (c.p_schedule.empty() == c.q_schedule.empty())
        bad_field("/p_schedule", "exactly one of p_schedule / q_schedule is required");
      if (!c.q_schedule.empty() && !c.p) bad_field("/p", "fixed p required for q schedules");
      for (double q : c.q_schedule)
        if (q == 0.0) bad_field("/q_schedule", "q must be nonzero");
      for (double p : c.p_schedule)
        if (p == 0.0) bad_field("/p_schedule", "p must be nonzero");
      break;
    case ExperimentKind::Planar:
      if (c.k < 3) bad_field("/k", "k >= 3 required");
      if (c.p_schedule.empty()) bad_field("/p_schedule", "required for planar");
      for (double p : c.p_schedule)
        if (!(p < -2.0)) bad_field("/p_schedule", "planar solves need p < -2 (super-critical)");
      break;
    case ExperimentKind::LocalMax:
      if (c.polytope.empty()) bad_field("/polytope", "required for localmax");
      if (!(c.delta > 0.0)) bad_field("/delta", "must be positive");
      if (c.trials < 1) bad_field("/trials", "must be >= 1");
      if (c.functional != "V" && c.functional != "Vq" && c.functional != "Vpf")
        bad_field("/functional", "must be V | Vq | Vpf");
      if (c.functional == "Vq" && (!c.q || *c.q == 0.0)) bad_field("/q", "nonzero q required for Vq");
      if (c.functional == "Vpf" && (!c.p || *c.p == 0.0)) bad_field("/p", "nonzero p required for Vpf");
      break;
    case ExperimentKind::VbarScan:
      if (c.polytope.empty()) bad_field("/polytope", "required for vbar-scan");
      break;
    case ExperimentKind::DualityCheck:
      if (c.group_spec.empty()) bad_field("/group", "required for duality-check");
      if (!c.p || !c.q) bad_field("/p", "both p and q are required for duality-check");
      if (*c.p == 0.0 || *c.q == 0.0) bad_field("/q", "p and q must be nonzero");
      break;
  }
  return c;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["version"] = version;
  j["kind"] = kind_name(kind);
  if (!group_spec.empty()) j["group"] = group_spec;
  Json f_j;
  f_j["kind"] = f.kind;
  if (f.kind == "constant") f_j["value"] = f.value;
  if (f.kind == "formula") f_j["expr"] = f.expr;
  if (f.kind == "table") f_j["path"] = f.table_path;
  j["f"] = f_j;
  if (p) j["p"] = *p;
  if (q) j["q"] = *q;
  if (!p_schedule.empty()) j["p_schedule"] = p_schedule;
  if (!q_schedule.empty()) j["q_schedule"] = q_schedule;
  j["k"] = k;
  if (!polytope.empty()) {
    j["polytope"] = polytope;
    j["polytope_n"] = polytope_n;
  }
  j["delta"] = delta;
  j["trials"] = trials;
  j["functional"] = functional;
  j["grid"] = Json{{"s1_m", s1_nodes}, {"s2_level", s2_level}};
  j["search_grid"] = Json{{"s1_m", search_s1_nodes}, {"s2_level", search_s2_level}};
  j["classes"] = classes;
  j["starts"] = starts;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  return j;
}

}  // namespace minklab
