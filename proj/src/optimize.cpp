#include "minklab/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

#include "minklab/errors.hpp"

namespace minklab {

namespace {

// --- direction <-> angle parametrization ------------------------------------

Vec dir_from_angles(int dim, const double* a) {
  if (dim == 2) return s1_point(a[0]);
  return s2_point(a[0], a[1]);
}

int angles_per_dir(int dim) { return dim - 1; }

void angles_from_dir(const Vec& d, double* a) {
  if (d.size() == 2) {
    a[0] = std::atan2(d[1], d[0]);
  } else {
    a[0] = std::acos(std::clamp(d[2], -1.0, 1.0));
    a[1] = std::atan2(d[1], d[0]);
  }
}

struct Objective {
  const SymmetryGroup* group;
  const DensitySpec* f;
  double p;
  double q;  // n+1 for the pure L_p case
  bool pure_lp;
  const SphereGrid* grid;
  int n_classes;
  // local_maximize_near constraint (empty when unconstrained)
  const BodyView* anchor = nullptr;
  double delta = 0.0;

  int dim() const { return group->dim; }
  int params_per_class() const { return angles_per_dir(dim()) + 1; }
  int n_params() const { return n_classes * params_per_class(); }

  std::vector<std::pair<Vec, double>> classes_of(const std::vector<double>& x) const {
    std::vector<std::pair<Vec, double>> cls;
    const int ppc = params_per_class();
    for (int c = 0; c < n_classes; ++c) {
      Vec d = dir_from_angles(dim(), x.data() + c * ppc);
      // The overall scale is a flat direction of the scale-invariant
      // functionals; pin the first class offset to 1.
      double off = c == 0 ? 1.0 : std::exp(x[static_cast<std::size_t>(c * ppc + ppc - 1)]);
      cls.emplace_back(d, off);
    }
    return cls;
  }

  // Returns -inf for infeasible proposals (unbounded body, outside the
  // delta-neighborhood).
  double eval(const std::vector<double>& x, ConvexBody* body_out = nullptr,
              double* dist_out = nullptr) const {
    try {
      FacetPolytope fp = make_orbit_facets(*group, classes_of(x));
      ConvexBody body = ConvexBody::from_facets(fp);
      if (anchor) {
        double m = body.min_support();
        ConvexBody normed = body.scaled(1.0 / m);
        double dist = hausdorff(normed.view(), *anchor, *grid);
        if (dist_out) *dist_out = dist;
        if (dist > delta) return -std::numeric_limits<double>::max();
      }
      double value;
      if (pure_lp) {
        value = F_p(body, *f, p, *grid).value;
      } else {
        value = F_pq(body, *f, p, q, *grid).value;
      }
      if (!std::isfinite(value)) return -std::numeric_limits<double>::max();
      if (body_out) *body_out = std::move(body);
      return value;
    } catch (const Error&) {
      return -std::numeric_limits<double>::max();
    }
  }
};

struct StartResult {
  double value = -std::numeric_limits<double>::max();
  std::vector<double> x;
  std::vector<TraceRow> trace;
  double final_distance = 0.0;
};

// Deterministic compass search with shrinking steps plus one Nelder-Mead
// restart; everything depends only on (objective, x0, budget), never on
// scheduling.
StartResult compass_start(const Objective& obj, std::vector<double> x0,
                          const MaximizeConfig& cfg, double p_now, double q_now) {
  const int n = obj.n_params();
  StartResult res;
  res.x = std::move(x0);
  double dist = 0.0;
  res.value = obj.eval(res.x, nullptr, &dist);
  res.final_distance = dist;
  int iter = 0;
  auto record = [&](double v) {
    TraceRow row;
    row.iter = iter;
    row.p = p_now;
    row.q = q_now;
    row.value = v;
    res.trace.push_back(row);
  };
  record(res.value);

  auto step_scale = [&](int j) {
    const int ppc = obj.params_per_class();
    return (j % ppc == ppc - 1) ? cfg.step_logoff : cfg.step_angle;
  };

  auto compass = [&](double shrink_until) {
    double s = 1.0;
    while (s > shrink_until && iter < cfg.max_iter) {
      ++iter;
      int best_j = -1;
      double best_v = res.value;
      double best_xj = 0.0;
      for (int j = 0; j < n; ++j) {
        // class-0 offset is pinned; skip its coordinate
        if (j == obj.params_per_class() - 1) continue;
        for (double sgn : {+1.0, -1.0}) {
          std::vector<double> cand = res.x;
          cand[static_cast<std::size_t>(j)] += sgn * s * step_scale(j);
          double v = obj.eval(cand);
          if (v > best_v) {
            best_v = v;
            best_j = j;
            best_xj = cand[static_cast<std::size_t>(j)];
          }
        }
      }
      if (best_j >= 0) {
        res.x[static_cast<std::size_t>(best_j)] = best_xj;
        res.value = best_v;
        record(best_v);
      } else {
        s *= 0.5;
      }
    }
  };
  compass(cfg.tol_step);

  if (cfg.simplex_restart && iter < cfg.max_iter) {
    // Small deterministic Nelder-Mead polish around the compass point.
    std::vector<std::vector<double>> simplex(static_cast<std::size_t>(n) + 1, res.x);
    std::vector<double> fv(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j < n; ++j)
      simplex[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(j)] += 0.05 * step_scale(j);
    for (int j = 0; j <= n; ++j) fv[static_cast<std::size_t>(j)] = obj.eval(simplex[static_cast<std::size_t>(j)]);
    const int nm_iter = std::min(200, cfg.max_iter - iter);
    for (int it = 0; it < nm_iter; ++it) {
      // order ascending (maximization: best = last)
      std::vector<int> ord(static_cast<std::size_t>(n) + 1);
      for (int j = 0; j <= n; ++j) ord[static_cast<std::size_t>(j)] = j;
      std::sort(ord.begin(), ord.end(), [&](int a, int b) {
        return fv[static_cast<std::size_t>(a)] < fv[static_cast<std::size_t>(b)];
      });
      int worst = ord[0], best = ord[static_cast<std::size_t>(n)];
      if (fv[static_cast<std::size_t>(best)] - fv[static_cast<std::size_t>(worst)] < 1e-12) break;
      std::vector<double> centroid(static_cast<std::size_t>(n), 0.0);
      for (int j = 0; j <= n; ++j) {
        if (j == worst) continue;
        for (int i = 0; i < n; ++i) centroid[static_cast<std::size_t>(i)] += simplex[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      }
      for (int i = 0; i < n; ++i) centroid[static_cast<std::size_t>(i)] /= n;
      auto blend = [&](double t) {
        std::vector<double> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
          y[static_cast<std::size_t>(i)] = centroid[static_cast<std::size_t>(i)] +
              t * (simplex[static_cast<std::size_t>(worst)][static_cast<std::size_t>(i)] - centroid[static_cast<std::size_t>(i)]);
        return y;
      };
      std::vector<double> refl = blend(-1.0);
      double fr = obj.eval(refl);
      if (fr > fv[static_cast<std::size_t>(best)]) {
        std::vector<double> exp_ = blend(-2.0);
        double fe = obj.eval(exp_);
        if (fe > fr) {
          simplex[static_cast<std::size_t>(worst)] = exp_;
          fv[static_cast<std::size_t>(worst)] = fe;
        } else {
          simplex[static_cast<std::size_t>(worst)] = refl;
          fv[static_cast<std::size_t>(worst)] = fr;
        }
      } else if (fr > fv[static_cast<std::size_t>(worst)]) {
        simplex[static_cast<std::size_t>(worst)] = refl;
        fv[static_cast<std::size_t>(worst)] = fr;
      } else {
        std::vector<double> con = blend(0.5);
        double fc = obj.eval(con);
        if (fc > fv[static_cast<std::size_t>(worst)]) {
          simplex[static_cast<std::size_t>(worst)] = con;
          fv[static_cast<std::size_t>(worst)] = fc;
        } else {
          for (int j = 0; j <= n; ++j) {
            if (j == best) continue;
            for (int i = 0; i < n; ++i)
              simplex[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 0.5 *
                  (simplex[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] +
                   simplex[static_cast<std::size_t>(best)][static_cast<std::size_t>(i)]);
            fv[static_cast<std::size_t>(j)] = obj.eval(simplex[static_cast<std::size_t>(j)]);
          }
        }
      }
    }
    int best = 0;
    for (int j = 1; j <= n; ++j)
      if (fv[static_cast<std::size_t>(j)] > fv[static_cast<std::size_t>(best)]) best = j;
    if (fv[static_cast<std::size_t>(best)] > res.value + 1e-14) {
      res.x = simplex[static_cast<std::size_t>(best)];
      res.value = fv[static_cast<std::size_t>(best)];
      ++iter;
      record(res.value);
      compass(cfg.tol_step);  // re-converge after the polish
    }
  }
  obj.eval(res.x, nullptr, &res.final_distance);
  return res;
}

std::vector<double> params_to_x(const Objective& obj, const OrbitParametrization& params) {
  std::vector<double> x(static_cast<std::size_t>(obj.n_params()), 0.0);
  const int ppc = obj.params_per_class();
  // Gauge: scale so the first class offset is 1.
  double gauge = params.classes.front().offset;
  for (int c = 0; c < obj.n_classes; ++c) {
    angles_from_dir(params.classes[static_cast<std::size_t>(c)].rep_direction,
                    x.data() + c * ppc);
    if (c > 0)
      x[static_cast<std::size_t>(c * ppc + ppc - 1)] =
          std::log(params.classes[static_cast<std::size_t>(c)].offset / gauge);
  }
  return x;
}

}  // namespace

int thread_budget(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MINKLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
}

ConvexBody build_body(const OrbitParametrization& params, std::vector<int>* active_classes) {
  std::vector<std::pair<Vec, double>> cls;
  for (const OrbitClass& c : params.classes) {
    if (std::abs(c.rep_direction.norm() - 1.0) > 1e-9)
      fail(ErrorCode::ConfigInvalid, "rep_direction must be a unit vector");
    if (!(c.offset > 0.0)) fail(ErrorCode::ConfigInvalid, "offsets must be positive");
    cls.emplace_back(c.rep_direction, c.offset);
  }
  std::vector<int> class_of;
  FacetPolytope fp = make_orbit_facets(params.group, cls, &class_of);
  ConvexBody body = ConvexBody::from_facets(fp);
  if (active_classes) {
    std::vector<char> pruned_facet(fp.normals.size(), 0);
    for (int i : body.pruned_facets()) pruned_facet[static_cast<std::size_t>(i)] = 1;
    std::vector<char> active(params.classes.size(), 0);
    for (std::size_t i = 0; i < class_of.size(); ++i)
      if (!pruned_facet[i]) active[static_cast<std::size_t>(class_of[i])] = 1;
    active_classes->clear();
    for (std::size_t c = 0; c < active.size(); ++c)
      if (active[c]) active_classes->push_back(static_cast<int>(c));
  }
  return body;
}

ConvexBody snapped_tangent_body(const OrbitParametrization& params,
                                const std::vector<int>& active_classes) {
  OrbitParametrization snap;
  snap.group = params.group;
  for (int c : active_classes) {
    OrbitClass oc = params.classes[static_cast<std::size_t>(c)];
    oc.offset = 1.0;
    snap.classes.push_back(oc);
  }
  if (snap.classes.empty()) fail(ErrorCode::NumericalFailure, "no active classes to snap");
  return build_body(snap);
}

double default_delta(const RegularPolytope& T) {
  return 0.3 * (T.circumradius() - T.inradius());
}

namespace {

MaximizerResult run_multistart(const Objective& obj, const OrbitParametrization& params0,
                               const MaximizeConfig& config, double p, double q_used,
                               const char* stuck_context) {
  const int n = obj.n_params();
  const int dim = obj.dim();
  std::vector<std::vector<double>> starts;
  starts.push_back(params_to_x(obj, params0));
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int s = 1; s < config.starts; ++s) {
    std::vector<double> x(static_cast<std::size_t>(n));
    const int ppc = obj.params_per_class();
    for (int c = 0; c < obj.n_classes; ++c) {
      // Quasi-random fundamental-domain directions via Halton angles,
      // canonicalized; offsets jittered around 1.
      double u1 = halton(static_cast<std::uint64_t>(s * obj.n_classes + c) + 1, 2);
      double u2 = halton(static_cast<std::uint64_t>(s * obj.n_classes + c) + 1, 3);
      Vec d = dim == 2 ? s1_point(2.0 * kPi * u1)
                       : s2_point(std::acos(1.0 - 2.0 * u1), 2.0 * kPi * u2);
      d = canonical_direction(*obj.group, d);
      angles_from_dir(d, x.data() + c * ppc);
      if (c > 0) x[static_cast<std::size_t>(c * ppc + ppc - 1)] = 0.4 * (U(rng) - 0.5);
    }
    starts.push_back(std::move(x));
  }

  const int workers = std::min<int>(thread_budget(config.threads), static_cast<int>(starts.size()));
  std::vector<StartResult> results(starts.size());
  if (workers <= 1) {
    for (std::size_t s = 0; s < starts.size(); ++s)
      results[s] = compass_start(obj, starts[s], config, p, q_used);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t s = next.fetch_add(1);
          if (s >= starts.size()) break;
          results[s] = compass_start(obj, starts[s], config, p, q_used);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // Deterministic order-fixed reduction keyed on the start index; ties prefer
  // the lexicographically smallest parameter vector.
  int best = 0;
  for (int s = 1; s < static_cast<int>(results.size()); ++s) {
    const double a = results[static_cast<std::size_t>(s)].value;
    const double b = results[static_cast<std::size_t>(best)].value;
    if (a > b + 1e-12) {
      best = s;
    } else if (std::abs(a - b) <= 1e-12) {
      const auto& xa = results[static_cast<std::size_t>(s)].x;
      const auto& xb = results[static_cast<std::size_t>(best)].x;
      if (std::lexicographical_compare(xa.begin(), xa.end(), xb.begin(), xb.end())) best = s;
    }
  }

  if (obj.anchor) {
    // BoundaryStuck when every start hugs the neighborhood boundary.
    bool all_stuck = true;
    for (const StartResult& r : results)
      if (r.value > -std::numeric_limits<double>::max() &&
          r.final_distance < 0.95 * obj.delta)
        all_stuck = false;
    if (all_stuck)
      fail(ErrorCode::BoundaryStuck,
           std::string("all starts ended near the neighborhood boundary (") + stuck_context +
               "); delta too small or p not negative enough");
  }

  const StartResult& win = results[static_cast<std::size_t>(best)];
  if (win.value <= -std::numeric_limits<double>::max())
    fail(ErrorCode::NumericalFailure, "no feasible point found by any start");

  MaximizerResult out;
  out.p = p;
  out.q = q_used;
  out.group_name = obj.group->name;
  out.no_improvement = win.value <= results[0].trace.front().value + 1e-12;
  // Rebuild the winning parametrization with canonical directions.
  OrbitParametrization params;
  params.group = *obj.group;
  auto cls = obj.classes_of(win.x);
  for (auto& [d, off] : cls) {
    OrbitClass oc;
    oc.rep_direction = canonical_direction(*obj.group, d);
    oc.offset = off;
    params.classes.push_back(oc);
  }
  out.params = params;
  out.trace = win.trace;
  out.final_distance = win.final_distance;
  return out;
}

}  // namespace

MaximizerResult maximize(const OrbitParametrization& params0, const DensitySpec& f, double p,
                         std::optional<double> q, const MaximizeConfig& config) {
  if (params0.classes.empty() || static_cast<int>(params0.classes.size()) > config.class_cap)
    fail(ErrorCode::ConfigInvalid, "class count out of range");
  const int dim = params0.group.dim;
  const int n_sphere = dim - 1;
  const bool pure_lp = !q.has_value();
  const double q_used = q.value_or(static_cast<double>(dim));
  if (p == 0.0 || q_used == 0.0) fail(ErrorCode::ConfigInvalid, "p and q must be nonzero");
  if (!(p < 0.0) && !(q_used > n_sphere))
    fail(ErrorCode::ConfigInvalid, "requires p < 0 or the dual regime q > n");
  SpanningReport span = spanning_check(params0.group, 12);
  if (!span.passes)
    fail(ErrorCode::NonSpanningGroup, "group fails the spanning check; maximization unbounded");

  SphereGrid grid = n_sphere == 1 ? s1_grid(config.s1_nodes) : s2_grid(config.s2_level);
  Objective obj;
  obj.group = &params0.group;
  obj.f = &f;
  obj.p = p;
  obj.q = q_used;
  obj.pure_lp = pure_lp;
  obj.grid = &grid;
  obj.n_classes = static_cast<int>(params0.classes.size());

  MaximizerResult out = run_multistart(obj, params0, config, p, q_used, "maximize");

  // Final normalization and fine-grid reporting.
  SphereGrid fine = n_sphere == 1 ? s1_grid(config.report_s1_nodes) : s2_grid(config.report_s2_level);
  ConvexBody body = build_body(out.params, &out.active_classes);
  double lambda = normalization_lambda(body.view(), f, p, fine);
  out.body = body.scaled(1.0 / lambda);
  out.value = pure_lp ? F_p(out.body, f, p, fine) : F_pq(out.body, f, p, q_used, fine);
  for (TraceRow& row : out.trace) {
    row.min_h = out.body.min_support();
    row.error_est = out.value.error;
  }
  if (!out.trace.empty()) {
    ConvexBody snap = snapped_tangent_body(out.params, out.active_classes);
    double dist = hausdorff(out.body.view(), snap.view(), fine);
    for (TraceRow& row : out.trace) row.hausdorff_to_snap = dist;
  }
  return out;
}

std::vector<ContinuationStep> continuation_study(const ContinuationSchedule& schedule,
                                                 const SymmetryGroup& group,
                                                 const DensitySpec& f,
                                                 const MaximizeConfig& config) {
  const bool q_mode = !schedule.q_values.empty();
  const std::vector<double>& seq = q_mode ? schedule.q_values : schedule.p_values;
  if (seq.empty()) fail(ErrorCode::ConfigInvalid, "empty continuation schedule");
  for (std::size_t i = 1; i < seq.size(); ++i) {
    bool mono = q_mode ? seq[i] > seq[i - 1] : seq[i] < seq[i - 1];
    if (!mono) fail(ErrorCode::ConfigInvalid, "schedule must be strictly monotone");
  }

  std::vector<ContinuationStep> steps;
  OrbitParametrization params;
  params.group = group;
  // Start from the coordinate-pole class plus quasi-random classes up to 3.
  {
    Vec pole = Vec::Zero(group.dim);
    pole[group.dim - 1] = 1.0;
    OrbitClass c0;
    c0.rep_direction = canonical_direction(group, pole);
    c0.offset = 1.0;
    params.classes.push_back(c0);
    for (int c = 1; c < 3; ++c) {
      double u1 = halton(static_cast<std::uint64_t>(c) + 3, 2);
      double u2 = halton(static_cast<std::uint64_t>(c) + 3, 3);
      Vec d = group.dim == 2 ? s1_point(2.0 * kPi * u1)
                             : s2_point(std::acos(1.0 - 2.0 * u1), 2.0 * kPi * u2);
      OrbitClass oc;
      oc.rep_direction = canonical_direction(group, d);
      oc.offset = 1.0;
      params.classes.push_back(oc);
    }
  }

  MaximizeConfig cfg = config;
  const int n_sphere = group.dim - 1;
  SphereGrid fine = n_sphere == 1 ? s1_grid(config.report_s1_nodes) : s2_grid(config.report_s2_level);
  for (std::size_t si = 0; si < seq.size(); ++si) {
    double p = q_mode ? schedule.fixed_p : seq[si];
    std::optional<double> q = q_mode ? std::optional<double>(seq[si]) : std::nullopt;
    MaximizerResult res = maximize(params, f, p, q, cfg);
    params = res.params;       // warm start
    cfg.starts = std::max(2, config.starts / 4);  // fewer fresh starts once warm
    ContinuationStep step;
    step.p = p;
    step.q = res.q;
    step.value = res.value;
    step.min_h = res.body.min_support();
    ConvexBody snap = snapped_tangent_body(res.params, res.active_classes);
    step.hausdorff_to_snap = hausdorff(res.body.view(), snap.view(), fine);
    step.result = std::move(res);
    steps.push_back(std::move(step));
  }
  return steps;
}

MaximizerResult local_maximize_near(const RegularPolytope& T_in, double delta,
                                    const DensitySpec& f, double p, std::optional<double> q,
                                    const MaximizeConfig& config) {
  RegularPolytope T = T_in.normalized(Normalization::Tangent);
  if (!T.group) fail(ErrorCode::ConfigInvalid, "local search needs an explicit symmetry group");
  if (!(delta > 0.0)) fail(ErrorCode::ConfigInvalid, "delta must be positive");
  const int dim = T.dim();
  const int n_sphere = dim - 1;
  const bool pure_lp = !q.has_value();
  const double q_used = q.value_or(static_cast<double>(dim));

  SphereGrid grid = n_sphere == 1 ? s1_grid(config.s1_nodes) : s2_grid(config.s2_level);
  ConvexBody Tbody = T.body();
  BodyView Tview = Tbody.view();

  OrbitParametrization params0;
  params0.group = *T.group;
  OrbitClass c0;
  c0.rep_direction = canonical_direction(*T.group, T.facet_normals.front());
  c0.offset = 1.0;
  params0.classes.push_back(c0);

  Objective obj;
  obj.group = &params0.group;
  obj.f = &f;
  obj.p = p;
  obj.q = q_used;
  obj.pure_lp = pure_lp;
  obj.grid = &grid;
  obj.n_classes = 1;
  obj.anchor = &Tview;
  obj.delta = delta;

  MaximizeConfig cfg = config;
  cfg.step_angle = std::min(cfg.step_angle, 0.5 * delta);
  MaximizerResult out = run_multistart(obj, params0, cfg, p, q_used, "local_maximize_near");

  SphereGrid fine = n_sphere == 1 ? s1_grid(config.report_s1_nodes) : s2_grid(config.report_s2_level);
  ConvexBody body = build_body(out.params, &out.active_classes);
  double m = body.min_support();
  out.body = body.scaled(1.0 / m);  // K_min frame near the tangent polytope
  out.value = pure_lp ? F_p(out.body, f, p, fine) : F_pq(out.body, f, p, q_used, fine);
  out.final_distance = hausdorff(out.body.view(), Tview, fine);
  out.interior = out.final_distance <= 0.8 * delta;
  for (TraceRow& row : out.trace) {
    row.min_h = out.body.min_support();
    row.error_est = out.value.error;
    row.hausdorff_to_snap = out.final_distance;
  }
  return out;
}

ContinuationSchedule ContinuationSchedule::geometric_p(double p0, double factor, int steps) {
  ContinuationSchedule s;
  double p = p0;
  for (int i = 0; i < steps; ++i) {
    s.p_values.push_back(p);
    p *= factor;
  }
  return s;
}

ContinuationSchedule ContinuationSchedule::geometric_q(double p_fixed, double q0, double factor,
                                                       int steps) {
  ContinuationSchedule s;
  s.fixed_p = p_fixed;
  double q = q0;
  for (int i = 0; i < steps; ++i) {
    s.q_values.push_back(q);
    q *= factor;
  }
  return s;
}

}  // namespace minklab
