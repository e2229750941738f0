#pragma once

#include <functional>
#include <vector>

#include "minklab/linalg.hpp"

namespace minklab {

/// Solution of h'' + h = f h^{p-1} on the fundamental arc [0, pi/k] in the
/// D_k-invariant class. The solve collocates in the cosine basis cos(j k
/// theta), which carries the Neumann ends h'(0) = h'(pi/k) = 0 exactly and
/// differentiates through the exact multipliers -(jk)^2.
struct PlanarSolution {
  int k = 4;
  double p = -10.0;
  std::vector<double> nodes;     // collocation angles in [0, pi/k]
  std::vector<double> h_values;  // positive
  std::vector<double> coeffs;    // cosine coefficients c_j of cos(j k theta)
  double residual = 0.0;         // max EL residual on a fine arc grid
  int newton_iters = 0;

  double max_h() const;
  double min_h() const;
  double eval(double theta) const;
  double eval_second_derivative(double theta) const;
  /// sup over the arc of |h - h_T| against the tangent k-gon support
  /// h_T(theta) = cos(theta) + tan(pi/k) sin(theta).
  double dist_to_polygon(int fine = 1024) const;
  /// F_p of the associated body (n = 1); V spectrally exact from the
  /// coefficients, the constraint integral by Gauss quadrature on the arc.
  double F_p_value(const std::function<double(double)>& f, double p_exp) const;
};

struct PlanarConfig {
  int modes = 0;                // 0: per-step resolution hint in continuation
  double newton_tol = 1e-12;    // Newton step tolerance
  double residual_tol = 1e-10;  // acceptance threshold on the EL residual
  int max_newton = 80;
};

enum class PlanarBranch { Trivial, Nontrivial };

/// Collocation + Newton from an explicit initial guess given at the
/// collocation nodes (uniform midpoints of the arc; see planar_nodes). The
/// resolution is the size of the guess: modes = init.size() - 1.
/// Throws NewtonDiverged / NonPositive; NumericalFailure when the converged
/// iterate fails the residual tolerance (insufficient modes).
PlanarSolution solve_planar(int k, const std::function<double(double)>& f, double p,
                            const std::vector<double>& init, const PlanarConfig& config = {});

std::vector<double> planar_nodes(int k, int modes);

/// Mode count that resolves the solution's sharpening edge region at a given
/// p (calibrated against deep continuations; roughly 10.4 |p| / k).
int planar_modes_hint(int k, double p);

/// Initial guesses: constant 1 for the trivial branch, the perturbed polygon
/// profile 0.9 + 0.1 sec(theta) clipped to [1, sec(pi/k)] for the nontrivial one.
std::vector<double> planar_init(int k, PlanarBranch branch, int modes);

struct PlanarContinuationStep {
  double p = 0.0;
  double max_h = 0.0;
  double min_h = 0.0;
  double dist_to_polygon = 0.0;
  double residual = 0.0;
  int newton_iters = 0;
  PlanarSolution solution;
};

/// Warm-started branch tracking over a monotone p schedule. At each step the
/// warm start competes with the perturbed-polygon seed and the solve with the
/// larger F_p is kept (the variational branch). p-steps are halved up to
/// 3 times on Newton failure; BranchLost afterwards.
std::vector<PlanarContinuationStep> continuation_planar(
    int k, const std::function<double(double)>& f, const std::vector<double>& p_schedule,
    const PlanarConfig& config = {});

}  // namespace minklab
