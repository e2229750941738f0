#include "minklab/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>
#include <sstream>

#include "minklab/errors.hpp"
#include "minklab/fspec.hpp"
#include "minklab/optimize.hpp"
#include "minklab/planar.hpp"
#include "minklab/regular.hpp"

namespace minklab {

namespace {

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct OutputCollector {
  std::string dir;
  RunManifest manifest;

  void emit(const std::string& name, const std::string& contents) {
    std::string path = dir + "/" + name;
    write_file(path, contents);
    manifest.outputs.emplace_back(name, hex64(fnv1a64(contents)));
  }
};

DensitySpec make_density(const ExperimentConfig& cfg, const SymmetryGroup& group,
                         const SphereGrid& grid) {
  if (cfg.f.kind == "constant") {
    DensitySpec d = DensitySpec::constant(cfg.f.value);
    d.certify(grid);
    return d;
  }
  if (cfg.f.kind == "formula") return density_from_formula(cfg.f.expr, group, grid);
  Json table = Json::parse(read_file(cfg.f.table_path));
  std::vector<double> values;
  for (const Json& v : table.at("values")) values.push_back(v.get<double>());
  return density_from_table(values, group, grid);
}

MaximizeConfig make_opt_config(const ExperimentConfig& cfg) {
  MaximizeConfig mc;
  mc.seed = cfg.seed;
  mc.starts = cfg.starts;
  mc.s1_nodes = cfg.search_s1_nodes;
  mc.s2_level = cfg.search_s2_level;
  mc.report_s1_nodes = cfg.s1_nodes;
  mc.report_s2_level = cfg.s2_level;
  return mc;
}

OrbitParametrization default_params(const SymmetryGroup& group, int classes) {
  OrbitParametrization params;
  params.group = group;
  Vec pole = Vec::Zero(group.dim);
  pole[group.dim - 1] = 1.0;
  OrbitClass c0;
  c0.rep_direction = canonical_direction(group, pole);
  c0.offset = 1.0;
  params.classes.push_back(c0);
  for (int c = 1; c < classes; ++c) {
    double u1 = halton(static_cast<std::uint64_t>(c) + 3, 2);
    double u2 = halton(static_cast<std::uint64_t>(c) + 3, 3);
    Vec d = group.dim == 2 ? s1_point(2.0 * kPi * u1)
                           : s2_point(std::acos(1.0 - 2.0 * u1), 2.0 * kPi * u2);
    OrbitClass oc;
    oc.rep_direction = canonical_direction(group, d);
    oc.offset = 1.0;
    params.classes.push_back(oc);
  }
  return params;
}

void run_group_info(const ExperimentConfig& cfg, OutputCollector& out, std::ostream& log) {
  SymmetryGroup g = catalog_from_spec(cfg.group_spec);
  SpanningReport rep = spanning_check(g, 16);
  Json j;
  j["group"] = cfg.group_spec;
  j["order"] = g.order();
  j["dim"] = g.dim;
  j["spanning"] = rep.passes;
  j["worst_gamma"] = rep.worst_gamma;
  j["fixed_subspace_dim"] = rep.fixed_subspace_dim;
  j["samples"] = rep.samples;
  if (rep.witness.size() > 0) {
    Json w = Json::array();
    for (int i = 0; i < rep.witness.size(); ++i) w.push_back(rep.witness[i]);
    j["witness"] = w;
  }
  out.emit("group-info.json", j.dump(2) + "\n");
  out.emit("group-elements.json", group_to_json(g).dump() + "\n");
  log << "group " << cfg.group_spec << " order " << g.order() << " spanning "
      << (rep.passes ? "true" : "false") << "\n";
}

void run_maximize(const ExperimentConfig& cfg, OutputCollector& out, std::ostream& log) {
  SymmetryGroup g = catalog_from_spec(cfg.group_spec);
  SphereGrid grid = g.dim == 2 ? s1_grid(cfg.s1_nodes) : s2_grid(cfg.s2_level);
  DensitySpec f = make_density(cfg, g, grid);
  OrbitParametrization params = default_params(g, cfg.classes);
  MaximizerResult res = maximize(params, f, *cfg.p, cfg.q, make_opt_config(cfg));
  out.emit("maximizer.json", maximizer_to_json(res).dump(2) + "\n");
  out.emit("trace.csv", trace_to_csv(res.trace));
  out.emit("body.off", to_off(res.body));
  log << "maximize p=" << *cfg.p << " value " << res.value.value << " +/- " << res.value.error
      << " min_h " << res.body.min_support() << "\n";
}

void run_continuation(const ExperimentConfig& cfg, OutputCollector& out, std::ostream& log) {
  SymmetryGroup g = catalog_from_spec(cfg.group_spec);
  SphereGrid grid = g.dim == 2 ? s1_grid(cfg.s1_nodes) : s2_grid(cfg.s2_level);
  DensitySpec f = make_density(cfg, g, grid);
  ContinuationSchedule sched;
  if (!cfg.p_schedule.empty()) {
    sched.p_values = cfg.p_schedule;
  } else {
    sched.q_values = cfg.q_schedule;
    sched.fixed_p = *cfg.p;
  }
  auto steps = continuation_study(sched, g, f, make_opt_config(cfg));
  std::ostringstream csv;
  csv << "step,p,q,value,error_est,min_h,hausdorff_to_snap\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const ContinuationStep& s = steps[i];
    csv << i << "," << format_double(s.p) << "," << format_double(s.q) << ","
        << format_double(s.value.value) << "," << format_double(s.value.error) << ","
        << format_double(s.min_h) << "," << format_double(s.hausdorff_to_snap) << "\n";
  }
  out.emit("continuation.csv", csv.str());
  out.emit("terminal-maximizer.json", maximizer_to_json(steps.back().result).dump(2) + "\n");
  out.emit("terminal-body.off", to_off(steps.back().result.body));
  log << "continuation " << steps.size() << " steps; terminal min_h " << steps.back().min_h
      << " dist_to_snap " << steps.back().hausdorff_to_snap << "\n";
}

void run_planar(const ExperimentConfig& cfg, OutputCollector& out, std::ostream& log) {
  std::function<double(double)> f_theta = [](double) { return 1.0; };
  if (cfg.f.kind == "constant") {
    double c = cfg.f.value;
    f_theta = [c](double) { return c; };
  } else if (cfg.f.kind == "formula") {
    auto fx = parse_expression(cfg.f.expr, 2);
    SymmetryGroup dk = catalog("dihedral", 1, cfg.k);
    auto elements = dk.elements;
    f_theta = [fx, elements](double theta) {
      double s = 0.0;
      Vec x = s1_point(theta);
      for (const Mat& m : elements) s += fx(m.transpose() * x);
      return s / static_cast<double>(elements.size());
    };
  } else {
    fail(ErrorCode::ConfigInvalid, "planar densities support constant | formula");
  }
  auto steps = continuation_planar(cfg.k, f_theta, cfg.p_schedule);
  out.emit("planar.csv", planar_to_csv(steps));
  Json j;
  j["k"] = cfg.k;
  Json arr = Json::array();
  const PlanarSolution& fin = steps.back().solution;
  for (std::size_t i = 0; i < fin.nodes.size(); ++i) {
    Json row;
    row["theta"] = fin.nodes[i];
    row["h"] = fin.h_values[i];
    arr.push_back(row);
  }
  j["terminal_solution"] = arr;
  out.emit("planar-terminal.json", j.dump() + "\n");
  log << "planar k=" << cfg.k << " terminal p=" << steps.back().p << " max_h "
      << steps.back().max_h << " residual " << steps.back().residual << "\n";
}

void run_localmax(const ExperimentConfig& cfg, OutputCollector& out, std::ostream& log) {
  RegularPolytope T = regular_catalog(cfg.polytope, cfg.polytope_n, cfg.k);
  LocalFunctional fn = LocalFunctional::V;
  if (cfg.functional == "Vq") fn = LocalFunctional::Vq;
  if (cfg.functional == "Vpf") fn = LocalFunctional::Vpf;
  LocalMaxReport rep = local_max_sample_test(T, cfg.delta, cfg.trials, cfg.seed, fn,
                                             cfg.q.value_or(2.0), cfg.p.value_or(1.0));
  Json j;
  j["polytope"] = cfg.polytope;
  j["functional"] = cfg.functional;
  j["delta"] = cfg.delta;
  j["trials"] = rep.trials;
  j["violations"] = rep.violations;
  j["skipped"] = rep.skipped_exact;
  j["worst_margin"] = rep.worst_margin;
  j["reference_value"] = rep.reference_value;
  out.emit("localmax.json", j.dump(2) + "\n");
  log << "localmax " << cfg.polytope << " " << cfg.functional << ": 0 violations in "
      << rep.trials << " trials, worst margin " << rep.worst_margin << "\n";
}

void run_vbar_scan(const ExperimentConfig& cfg, OutputCollector& out, std::ostream& log) {
  RegularPolytope T = regular_catalog(cfg.polytope, cfg.polytope_n, cfg.k);
  Flag flag = default_flag(T);
  CentroidChain chain = centroid_chain(T, flag);
  BaseSimplex bs = base_simplex(T, chain, flag);
  Json meta;
  meta["polytope"] = cfg.polytope;
  meta["chain_orthogonality_residual"] = chain.orthogonality_residual();
  Json Rj = Json::array();
  for (double r : chain.R) Rj.push_back(r);
  meta["R"] = Rj;
  meta["chains_per_facet"] = bs.chains_per_facet;
  Json verts = Json::array();
  for (const Vec& w : bs.vertices) {
    Json v = Json::array();
    for (int i = 0; i < w.size(); ++i) v.push_back(w[i]);
    verts.push_back(v);
  }
  meta["base_simplex"] = verts;
  out.emit("chain.json", meta.dump(2) + "\n");

  // Scan radius: 0.2 diam(Omega_n) along rays into the simplex.
  double diam = 0.0;
  for (const Vec& a : bs.vertices)
    for (const Vec& b : bs.vertices) diam = std::max(diam, (a - b).norm());
  const double rmax = 0.2 * diam;
  std::ostringstream csv;
  csv << "r";
  for (int i = 0; i < bs.n; ++i) csv << ",w" << i;
  csv << ",vbar\n";
  Vec centroid_dir = Vec::Zero(bs.n);
  for (const Vec& w : bs.vertices) centroid_dir += w;
  centroid_dir /= static_cast<double>(bs.vertices.size());
  centroid_dir = centroid_dir / centroid_dir.norm();
  for (int i = 0; i <= 32; ++i) {
    double r = rmax * i / 32.0;
    Vec w0 = r * centroid_dir;
    csv << format_double(r);
    for (int d = 0; d < bs.n; ++d) csv << "," << format_double(w0[d]);
    csv << "," << format_double(vbar(bs, w0)) << "\n";
  }
  out.emit("vbar-scan.csv", csv.str());
  log << "vbar scan " << cfg.polytope << " rmax " << rmax << "\n";
}

void run_duality(const ExperimentConfig& cfg, OutputCollector& out, std::ostream& log) {
  SymmetryGroup g = catalog_from_spec(cfg.group_spec);
  SphereGrid grid = g.dim == 2 ? s1_grid(cfg.s1_nodes) : s2_grid(cfg.s2_level);
  DensitySpec f = make_density(cfg, g, grid);
  // Random invariant polytopes from seeded orbit classes.
  std::ostringstream csv;
  csv << "sample,residual\n";
  double worst = 0.0;
  const int samples = std::max(1, cfg.trials / 25);
  for (int s = 0; s < samples; ++s) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(s)));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<std::pair<Vec, double>> classes;
    int ncls = 1 + static_cast<int>(U(rng) * 2.0);
    for (int c = 0; c < ncls; ++c) {
      Vec d(g.dim);
      std::normal_distribution<double> N(0.0, 1.0);
      for (int i = 0; i < g.dim; ++i) d[i] = N(rng);
      classes.emplace_back(unit(d), 0.8 + 0.4 * U(rng));
    }
    ConvexBody body = ConvexBody::from_facets(make_orbit_facets(g, classes));
    double r = duality_check(body, f, *cfg.p, *cfg.q, grid);
    worst = std::max(worst, r);
    csv << s << "," << format_double(r) << "\n";
  }
  out.emit("duality.csv", csv.str());
  log << "duality residual worst " << worst << " over " << samples << " samples\n";
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  OutputCollector out;
  out.dir = cfg.out_dir;
  out.manifest.tool_version = kToolVersion;
  out.manifest.config_hash = hex64(fnv1a64(cfg.to_json().dump()));
  out.manifest.started_at = iso_now();
  try {
    switch (cfg.kind) {
      case ExperimentKind::GroupInfo: run_group_info(cfg, out, log); break;
      case ExperimentKind::Maximize: run_maximize(cfg, out, log); break;
      case ExperimentKind::Continuation: run_continuation(cfg, out, log); break;
      case ExperimentKind::Planar: run_planar(cfg, out, log); break;
      case ExperimentKind::LocalMax: run_localmax(cfg, out, log); break;
      case ExperimentKind::VbarScan: run_vbar_scan(cfg, out, log); break;
      case ExperimentKind::DualityCheck: run_duality(cfg, out, log); break;
    }
  } catch (const Error& e) {
    Json j;
    j["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
    err << j.dump() << "\n";
    return is_validation_error(e.code()) ? 2 : 3;
  }
  out.manifest.finished_at = iso_now();
  write_file(cfg.out_dir + "/manifest.json", out.manifest.to_json().dump(2) + "\n");
  return 0;
}

int run_config_file(const std::string& path, std::ostream& log, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    Json j = Json::parse(read_file(path));
    cfg = ExperimentConfig::from_json(j);
  } catch (const Json::exception& e) {
    Json j;
    j["error"] = {{"code", "ConfigInvalid"}, {"message", std::string("JSON parse: ") + e.what()}};
    err << j.dump() << "\n";
    return 2;
  } catch (const Error& e) {
    Json j;
    j["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
    err << j.dump() << "\n";
    return is_validation_error(e.code()) ? 2 : 3;
  }
  return run_experiment(cfg, log, err);
}

}  // namespace minklab
