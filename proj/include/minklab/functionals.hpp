#pragma once

#include <functional>
#include <vector>

#include "minklab/bodies.hpp"
#include "minklab/quadrature.hpp"

namespace minklab {

/// Positive density on S^n with certified bounds c1 <= f <= c2.
struct DensitySpec {
  std::function<double(const Vec&)> f = [](const Vec&) { return 1.0; };
  double c1 = 1.0;
  double c2 = 1.0;
  bool is_constant_one = true;

  static DensitySpec constant(double c);
  /// Verifies positivity on the grid and records the observed bounds.
  void certify(const SphereGrid& grid);
  /// Max over grid and group of |f(phi^T x) - f(x)|.
  double invariance_defect(const SymmetryGroup& group, const SphereGrid& grid) const;
};

struct FunctionalParams {
  double p = -10.0;
  double q = 0.0;  // 0 means "use q = n+1" (the pure L_p case)
};

/// Value with an attached uncertainty estimate. Acceptance thresholds compare
/// against value +/- error.
struct ValueWithError {
  double value = 0.0;
  double error = 0.0;
};

/// lambda = (int f h^p / int f)^{1/p}; the body scaled by 1/lambda satisfies
/// the K_p constraint int f h~^p = int f.
double normalization_lambda(const BodyView& body, const DensitySpec& f, double p,
                            const SphereGrid& grid);

/// F_p(Omega) = V(Omega) (int f h^p / int f)^{-(n+1)/p}. Scale-invariant.
ValueWithError F_p(const ConvexBody& body, const DensitySpec& f, double p,
                   const SphereGrid& grid);

/// Grid-backed variant: V computed from the radial function by quadrature.
ValueWithError F_p(const BodyView& body, const DensitySpec& f, double p,
                   const SphereGrid& grid);

/// F_{p,q}(Omega) = V_q(Omega) (int f h^p / int f)^{-q/p}; F_{p,n+1} = F_p.
ValueWithError F_pq(const ConvexBody& body, const DensitySpec& f, double p, double q,
                    const SphereGrid& grid);

/// F_{-infinity}(Omega) = V(Omega) / min h^{n+1}; exact for polytopes.
double F_minus_infinity(const ConvexBody& body);
ValueWithError F_minus_infinity(const BodyView& body, const SphereGrid& grid);

/// F_{-infinity,q}(Omega) = V_q(Omega) / (min h)^q.
ValueWithError F_minus_infinity_q(const ConvexBody& body, double q, const SphereGrid& grid);

/// F*_{p,q}(Omega) = (int h^p) (int f r^q / int f)^{-p/q}.
ValueWithError F_star_pq(const ConvexBody& body, const DensitySpec& f, double p, double q,
                         const SphereGrid& grid);

/// |F_{-q,-p}(Omega) - F*_{p,q}(Omega*)|; expected <= 1e-6 at default grids.
double duality_check(const ConvexBody& body, const DensitySpec& f, double p, double q,
                     const SphereGrid& grid);

struct BallBoundReport {
  double value = 0.0;  // int over S^n of h_{Omega*}^{-q} after normalization
  double bound = 0.0;  // (n+1) omega_{n+1} = |S^n|
  double gap = 0.0;    // bound - value (zero only for the ball)
};

/// Lemma-6.2-style bound for q < 0. The body is normalized internally so the
/// polar has max radial 1 (equivalently min support of the body is 1).
BallBoundReport ball_bound_check(const ConvexBody& body, double q, const SphereGrid& grid);

/// Max over nodes of |h'' + h - f h^{p-1}| for 2*pi-periodic samples
/// (uniform grid), using Fourier spectral differentiation.
double planar_EL_residual(const std::vector<double>& h_samples,
                          const std::function<double(double)>& f_of_theta, double p);

/// Exact |S^n| for n in {1, 2, 3}.
double sphere_area(int n);

}  // namespace minklab
