#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minklab/bodies.hpp"
#include "minklab/functionals.hpp"
#include "minklab/regular.hpp"
#include "minklab/symmetry.hpp"

namespace minklab {

/// One facet-orbit class: all facets phi(rep_direction) at a common offset.
struct OrbitClass {
  Vec rep_direction;  // unit, canonical fundamental-domain representative
  double offset = 1.0;
};

/// Group-invariant facet parametrization: the facet set is the union of the
/// orbits of the classes. Convexity is automatic (halfspace intersection).
struct OrbitParametrization {
  SymmetryGroup group;
  std::vector<OrbitClass> classes;
};

/// Builds the polytope; redundant facets are pruned (recorded in the result).
/// Throws Unbounded when the orbit normals fail to positively span.
ConvexBody build_body(const OrbitParametrization& params,
                      std::vector<int>* active_classes = nullptr);

struct TraceRow {
  int iter = 0;
  double p = 0.0;
  double q = 0.0;
  double value = 0.0;
  double error_est = 0.0;
  double min_h = 0.0;              // after lambda normalization
  double hausdorff_to_snap = 0.0;  // distance to the snapped tangent polytope
};

struct MaximizerResult {
  OrbitParametrization params;
  ConvexBody body;                  // lambda-normalized (K_p constraint holds)
  ValueWithError value;             // functional value at the maximizer
  std::vector<TraceRow> trace;      // accepted iterates, non-decreasing values
  double p = 0.0;
  double q = 0.0;                   // n+1 when the pure L_p functional was used
  std::string group_name;
  std::vector<int> active_classes;  // classes with irredundant facets
  bool no_improvement = false;      // flagged when no start improved on init
  bool interior = false;            // local_maximize_near: stayed inside 0.8 delta
  double final_distance = 0.0;      // local_maximize_near: distance to T
};

struct MaximizeConfig {
  int starts = 8;
  std::uint64_t seed = 20240817;
  int max_iter = 400;             // compass iterations per start
  double step_angle = 0.25;       // initial angular step (radians)
  double step_logoff = 0.20;      // initial log-offset step
  double tol_step = 2e-5;         // stop when the probe step falls below this
  int s1_nodes = 512;             // search grid (final value re-evaluated finer)
  int s2_level = 16;
  int report_s1_nodes = kDefaultS1Nodes;
  int report_s2_level = kDefaultS2Level;
  int threads = 0;                // 0: use MINKLAB_THREADS or hardware
  bool simplex_restart = true;    // Nelder-Mead polish after compass converges
  int class_cap = 6;
};

/// Derivative-free ascent of F_p (q = n+1) or F_{p,q} over the orbit
/// parametrization, multi-start, deterministic per seed.
/// Requires p < 0 or q > n (the dual regime of Remark-6.1 type).
/// Throws NonSpanningGroup.
MaximizerResult maximize(const OrbitParametrization& params0, const DensitySpec& f,
                         double p, std::optional<double> q, const MaximizeConfig& config);

struct ContinuationSchedule {
  std::vector<double> p_values;  // strictly monotone when used
  std::vector<double> q_values;  // exactly one of the two may be non-trivial
  static ContinuationSchedule geometric_p(double p0, double factor, int steps);
  static ContinuationSchedule geometric_q(double p_fixed, double q0, double factor, int steps);
  double fixed_p = 0.0;  // for q schedules
};

struct ContinuationStep {
  double p = 0.0;
  double q = 0.0;
  double min_h = 0.0;                   // of the normalized body
  double hausdorff_to_snap = 0.0;
  ValueWithError value;
  MaximizerResult result;
};

/// Warm-started continuation along the schedule; per-step record of
/// min_support(normalized body), distance to the snapped tangent polytope
/// (active facet orbits with offsets set to 1), and the functional value.
std::vector<ContinuationStep> continuation_study(const ContinuationSchedule& schedule,
                                                 const SymmetryGroup& group,
                                                 const DensitySpec& f,
                                                 const MaximizeConfig& config);

/// Search restricted to bodies within Hausdorff delta of the regular tangent
/// polytope T (proposals beyond delta are rejected). The result is flagged
/// interior when the final distance is <= 0.8 delta. Throws BoundaryStuck when
/// every start ends within 0.05 delta of the boundary.
MaximizerResult local_maximize_near(const RegularPolytope& T, double delta,
                                    const DensitySpec& f, double p,
                                    std::optional<double> q, const MaximizeConfig& config);

/// Default neighborhood radius: 0.3 (circumradius - inradius) of T.
double default_delta(const RegularPolytope& T);

/// Snapped tangent polytope: the active classes of `params` with offsets 1.
ConvexBody snapped_tangent_body(const OrbitParametrization& params,
                                const std::vector<int>& active_classes);

int thread_budget(int requested);

}  // namespace minklab
