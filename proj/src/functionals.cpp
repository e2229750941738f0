#include "minklab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minklab/errors.hpp"

namespace minklab {

double sphere_area(int n) {
  switch (n) {
    case 1: return 2.0 * kPi;
    case 2: return 4.0 * kPi;
    case 3: return 2.0 * kPi * kPi;
    default: fail(ErrorCode::ConfigInvalid, "sphere_area supports n in {1,2,3}");
  }
}

DensitySpec DensitySpec::constant(double c) {
  if (!(c > 0.0)) fail(ErrorCode::ConfigInvalid, "density constant must be positive");
  DensitySpec d;
  d.f = [c](const Vec&) { return c; };
  d.c1 = d.c2 = c;
  d.is_constant_one = (c == 1.0);
  return d;
}

void DensitySpec::certify(const SphereGrid& grid) {
  double lo = std::numeric_limits<double>::max(), hi = -lo;
  for (const Vec& x : grid.nodes) {
    double v = f(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo > 0.0)) fail(ErrorCode::ConfigInvalid, "density is not positive on the grid");
  c1 = lo;
  c2 = hi;
  is_constant_one = (std::abs(lo - 1.0) < 1e-15 && std::abs(hi - 1.0) < 1e-15);
}

double DensitySpec::invariance_defect(const SymmetryGroup& group, const SphereGrid& grid) const {
  double worst = 0.0;
  for (const Mat& m : group.elements) {
    Mat mt = m.transpose();
    for (const Vec& x : grid.nodes) worst = std::max(worst, std::abs(f(mt * x) - f(x)));
  }
  return worst;
}

double normalization_lambda(const BodyView& body, const DensitySpec& f, double p,
                            const SphereGrid& grid) {
  if (p == 0.0) fail(ErrorCode::ConfigInvalid, "normalization_lambda requires p != 0");
  double num = integral_fhp(grid, f.f, body.support, p);
  double den = f.is_constant_one ? grid.total_weight() : integrate(grid, f.f);
  return std::pow(num / den, 1.0 / p);
}

namespace {

// Constraint factor (int f h^p / int f)^{-e/p} and a crude quadrature error
// estimate from a coarse subsampling of the grid.
double constraint_power(const BodyView& body, const DensitySpec& f, double p, double e,
                        const SphereGrid& grid) {
  double num = integral_fhp(grid, f.f, body.support, p);
  double den = f.is_constant_one ? grid.total_weight() : integrate(grid, f.f);
  return std::pow(num / den, -e / p);
}

}  // namespace

ValueWithError F_p(const ConvexBody& body, const DensitySpec& f, double p,
                   const SphereGrid& grid) {
  if (p == 0.0) fail(ErrorCode::ConfigInvalid, "F_p requires p != 0");
  const int d = body.dim();
  BodyView v = body.view();
  double factor = constraint_power(v, f, p, static_cast<double>(d), grid);
  // Error estimate: exact V; constraint factor compared on the half grid.
  SphereGrid half = sphere_grid(grid.n, grid.size() / 4);
  double factor2 = constraint_power(v, f, p, static_cast<double>(d), half);
  ValueWithError out;
  out.value = body.V() * factor;
  out.error = std::abs(body.V()) * std::abs(factor - factor2);
  return out;
}

ValueWithError F_p(const BodyView& body, const DensitySpec& f, double p,
                   const SphereGrid& grid) {
  if (p == 0.0) fail(ErrorCode::ConfigInvalid, "F_p requires p != 0");
  const int d = body.dim;
  // V(Omega) = int r^{n+1} dsigma = (n+1)|Omega|.
  double V = Vq(grid, body.radial, static_cast<double>(d));
  double factor = constraint_power(body, f, p, static_cast<double>(d), grid);
  SphereGrid half = sphere_grid(grid.n, grid.size() / 4);
  double V2 = Vq(half, body.radial, static_cast<double>(d));
  double factor2 = constraint_power(body, f, p, static_cast<double>(d), half);
  ValueWithError out;
  out.value = V * factor;
  out.error = std::abs(V * factor - V2 * factor2) +
              static_cast<double>(d) * body.min_support_uncertainty * std::abs(out.value);
  return out;
}

ValueWithError F_pq(const ConvexBody& body, const DensitySpec& f, double p, double q,
                    const SphereGrid& grid) {
  if (p == 0.0 || q == 0.0) fail(ErrorCode::ConfigInvalid, "F_pq requires p, q != 0");
  BodyView v = body.view();
  double vq = Vq(grid, v.radial, q);
  double factor = constraint_power(v, f, p, q, grid);
  SphereGrid half = sphere_grid(grid.n, grid.size() / 4);
  double vq2 = Vq(half, v.radial, q);
  double factor2 = constraint_power(v, f, p, q, half);
  ValueWithError out;
  out.value = vq * factor;
  out.error = std::abs(vq * factor - vq2 * factor2);
  return out;
}

double F_minus_infinity(const ConvexBody& body) {
  double m = body.min_support();
  return body.V() / std::pow(m, body.dim());
}

ValueWithError F_minus_infinity(const BodyView& body, const SphereGrid& grid) {
  const int d = body.dim;
  double V = Vq(grid, body.radial, static_cast<double>(d));
  double m = std::numeric_limits<double>::max();
  for (const Vec& x : grid.nodes) m = std::min(m, body.support(x));
  // Grid minimum of the support overestimates the true minimum by at most
  // Lipschitz * spacing; surfaced as part of the uncertainty.
  double unc = body.min_support_uncertainty > 0.0
                   ? body.min_support_uncertainty
                   : grid.spacing();  // support Lipschitz constant <= max|h| ~ O(1) bodies
  SphereGrid half = sphere_grid(grid.n, grid.size() / 4);
  double V2 = Vq(half, body.radial, static_cast<double>(d));
  ValueWithError out;
  out.value = V / std::pow(m, d);
  out.error = std::abs(V - V2) / std::pow(m, d) +
              std::abs(out.value) * d * unc / std::max(m, 1e-12);
  return out;
}

ValueWithError F_minus_infinity_q(const ConvexBody& body, double q, const SphereGrid& grid) {
  if (q == 0.0) fail(ErrorCode::ConfigInvalid, "F_minus_infinity_q requires q != 0");
  BodyView v = body.view();
  double vq = Vq(grid, v.radial, q);
  SphereGrid half = sphere_grid(grid.n, grid.size() / 4);
  double vq2 = Vq(half, v.radial, q);
  double m = body.min_support();
  ValueWithError out;
  out.value = vq / std::pow(m, q);
  out.error = std::abs(vq - vq2) / std::pow(m, q);
  return out;
}

ValueWithError F_star_pq(const ConvexBody& body, const DensitySpec& f, double p, double q,
                         const SphereGrid& grid) {
  if (p == 0.0 || q == 0.0) fail(ErrorCode::ConfigInvalid, "F_star_pq requires p, q != 0");
  BodyView v = body.view();
  double hp = integral_fhp(grid, [](const Vec&) { return 1.0; }, v.support, p);
  double num = 0.0;  // int f r^q
  {
    std::vector<double> terms(grid.nodes.size());
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
      double rv = v.radial(grid.nodes[i]);
      if (!(rv > 0.0)) fail(ErrorCode::NonpositiveRadial, "radial must be positive");
      terms[i] = grid.weights[i] * f.f(grid.nodes[i]) * std::pow(rv, q);
    }
    num = pairwise_sum(terms);
  }
  double den = f.is_constant_one ? grid.total_weight() : integrate(grid, f.f);
  ValueWithError out;
  out.value = hp * std::pow(num / den, -p / q);
  SphereGrid half = sphere_grid(grid.n, grid.size() / 4);
  double hp2 = integral_fhp(half, [](const Vec&) { return 1.0; }, v.support, p);
  double num2 = 0.0;
  {
    std::vector<double> terms(half.nodes.size());
    for (std::size_t i = 0; i < half.nodes.size(); ++i)
      terms[i] = half.weights[i] * f.f(half.nodes[i]) * std::pow(v.radial(half.nodes[i]), q);
    num2 = pairwise_sum(terms);
  }
  double den2 = f.is_constant_one ? half.total_weight() : integrate(half, f.f);
  out.error = std::abs(out.value - hp2 * std::pow(num2 / den2, -p / q));
  return out;
}

double duality_check(const ConvexBody& body, const DensitySpec& f, double p, double q,
                     const SphereGrid& grid) {
  ValueWithError lhs = F_pq(body, f, -q, -p, grid);
  ConvexBody star = polar(body);
  ValueWithError rhs = F_star_pq(star, f, p, q, grid);
  return std::abs(lhs.value - rhs.value);
}

BallBoundReport ball_bound_check(const ConvexBody& body, double q, const SphereGrid& grid) {
  if (!(q < 0.0)) fail(ErrorCode::ConfigInvalid, "ball_bound_check requires q < 0");
  // Normalize so the polar has max radial 1, i.e. min support of the body is 1.
  ConvexBody norm = body.scaled(1.0 / body.min_support());
  ConvexBody star = polar(norm);
  BodyView sv = star.view();
  BallBoundReport rep;
  rep.value = integral_fhp(grid, [](const Vec&) { return 1.0; }, sv.support, -q);
  rep.bound = sphere_area(grid.n);
  rep.gap = rep.bound - rep.value;
  if (rep.value > rep.bound + 1e-6)
    fail(ErrorCode::NumericalFailure, "ball bound violated beyond tolerance");
  return rep;
}

double planar_EL_residual(const std::vector<double>& h_samples,
                          const std::function<double(double)>& f_of_theta, double p) {
  const int m = static_cast<int>(h_samples.size());
  if (m < 8) fail(ErrorCode::ConfigInvalid, "need at least 8 samples");
  // Direct real DFT (m is a few thousand at most); second derivative from
  // the Fourier multipliers -k^2.
  const int kmax = m / 2;
  std::vector<double> a(static_cast<std::size_t>(kmax) + 1, 0.0),
      b(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (int k = 0; k <= kmax; ++k) {
    double ca = 0.0, cb = 0.0;
    for (int j = 0; j < m; ++j) {
      double t = 2.0 * kPi * k * j / m;
      ca += h_samples[static_cast<std::size_t>(j)] * std::cos(t);
      cb += h_samples[static_cast<std::size_t>(j)] * std::sin(t);
    }
    a[static_cast<std::size_t>(k)] = 2.0 * ca / m;
    b[static_cast<std::size_t>(k)] = 2.0 * cb / m;
  }
  a[0] *= 0.5;
  if (m % 2 == 0) a[static_cast<std::size_t>(kmax)] *= 0.5;
  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    double theta = 2.0 * kPi * j / m;
    double hpp = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      double t = static_cast<double>(k) * theta;
      hpp -= static_cast<double>(k) * static_cast<double>(k) *
             (a[static_cast<std::size_t>(k)] * std::cos(t) + b[static_cast<std::size_t>(k)] * std::sin(t));
    }
    double h = h_samples[static_cast<std::size_t>(j)];
    if (!(h > 0.0)) fail(ErrorCode::NonpositiveSupport, "h must be positive");
    double res = hpp + h - f_of_theta(theta) * std::pow(h, p - 1.0);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

}  // namespace minklab
