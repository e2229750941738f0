#include "minklab/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "minklab/errors.hpp"

namespace minklab {

namespace {

// Gauss-Legendre on [0, L] (constraint integrals on the arc).
void gauss_arc(int m, double L, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(m), 0.0);
  w.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = 0.5 * L * (1.0 - z);
    x[static_cast<std::size_t>(m - 1 - i)] = 0.5 * L * (1.0 + z);
    double wi = L / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(m - 1 - i)] = wi;
  }
}

double eval_cos_series(const std::vector<double>& c, int k, double theta, int deriv2) {
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    double jk = static_cast<double>(j) * k;
    double term = c[j] * std::cos(jk * theta);
    if (deriv2) term *= -jk * jk;
    s += term;
  }
  return s;
}

}  // namespace

double PlanarSolution::eval(double theta) const { return eval_cos_series(coeffs, k, theta, 0); }

double PlanarSolution::eval_second_derivative(double theta) const {
  return eval_cos_series(coeffs, k, theta, 1);
}

double PlanarSolution::max_h() const {
  double m = -std::numeric_limits<double>::max();
  const double L = kPi / k;
  for (int i = 0; i <= 512; ++i) m = std::max(m, eval(L * i / 512.0));
  return m;
}

double PlanarSolution::min_h() const {
  double m = std::numeric_limits<double>::max();
  const double L = kPi / k;
  for (int i = 0; i <= 512; ++i) m = std::min(m, eval(L * i / 512.0));
  return m;
}

double PlanarSolution::dist_to_polygon(int fine) const {
  const double L = kPi / k;
  const double tk = std::tan(kPi / k);
  double worst = 0.0;
  for (int i = 0; i <= fine; ++i) {
    double t = L * i / fine;
    double hT = std::cos(t) + tk * std::sin(t);
    worst = std::max(worst, std::abs(eval(t) - hT));
  }
  return worst;
}

double PlanarSolution::F_p_value(const std::function<double(double)>& f, double p_exp) const {
  const double L = kPi / k;
  // V = 2k * int_arc h (h'' + h); orthogonality of the cosine basis gives
  // int_arc = L c_0^2 + (L/2) sum_{j>=1} (1 - (jk)^2) c_j^2.
  double V_arc = L * coeffs[0] * coeffs[0];
  for (std::size_t j = 1; j < coeffs.size(); ++j) {
    double jk = static_cast<double>(j) * k;
    V_arc += 0.5 * L * (1.0 - jk * jk) * coeffs[j] * coeffs[j];
  }
  double V = 2.0 * k * V_arc;
  std::vector<double> x, w;
  gauss_arc(4 * static_cast<int>(coeffs.size()), L, x, w);
  double fhp = 0.0, ftot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double fv = f(x[i]);
    fhp += w[i] * fv * std::pow(eval(x[i]), p_exp);
    ftot += w[i] * fv;
  }
  return V * std::pow(fhp / ftot, -2.0 / p_exp);
}

std::vector<double> planar_nodes(int k, int modes) {
  const double L = kPi / k;
  std::vector<double> nodes(static_cast<std::size_t>(modes) + 1);
  for (int i = 0; i <= modes; ++i) nodes[static_cast<std::size_t>(i)] = L * (i + 0.5) / (modes + 1);
  return nodes;
}

std::vector<double> planar_init(int k, PlanarBranch branch, int modes) {
  std::vector<double> nodes = planar_nodes(k, modes);
  std::vector<double> init(nodes.size());
  const double cap = 1.0 / std::cos(kPi / k);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (branch == PlanarBranch::Trivial) {
      init[i] = 1.0;
    } else {
      init[i] = std::clamp(0.9 + 0.1 / std::cos(nodes[i]), 1.0, cap);
    }
  }
  return init;
}

PlanarSolution solve_planar(int k, const std::function<double(double)>& f, double p,
                            const std::vector<double>& init, const PlanarConfig& config) {
  if (k < 3) fail(ErrorCode::ConfigInvalid, "solve_planar requires k >= 3");
  if (!(p < -2.0)) fail(ErrorCode::ConfigInvalid, "solve_planar requires p < -2 (super-critical)");
  if (init.size() < 9) fail(ErrorCode::ConfigInvalid, "initial guess too small");
  const int M = static_cast<int>(init.size()) - 1;
  std::vector<double> nodes = planar_nodes(k, M);

  // Collocation matrix B_{ij} = cos(j k theta_i); c = B^{-1} h at the start.
  Mat B(M + 1, M + 1);
  for (int i = 0; i <= M; ++i)
    for (int j = 0; j <= M; ++j) B(i, j) = std::cos(static_cast<double>(j) * k * nodes[static_cast<std::size_t>(i)]);
  Eigen::PartialPivLU<Mat> Blu(B);
  Vec h0(M + 1);
  for (int i = 0; i <= M; ++i) h0[i] = init[static_cast<std::size_t>(i)];
  Vec c = Blu.solve(h0);

  auto residual_vec = [&](const Vec& coef, Vec& out) -> bool {
    Vec h = B * coef;
    if (h.minCoeff() <= 0.0) return false;
    for (int i = 0; i <= M; ++i) {
      double hpp = 0.0;
      for (int j = 1; j <= M; ++j) {
        double jk = static_cast<double>(j) * k;
        hpp -= jk * jk * coef[j] * B(i, j);
      }
      out[i] = hpp + h[i] - f(nodes[static_cast<std::size_t>(i)]) * std::pow(h[i], p - 1.0);
    }
    return true;
  };

  Vec F(M + 1), Fcand(M + 1);
  Mat J(M + 1, M + 1);
  if (!residual_vec(c, F)) fail(ErrorCode::NonPositive, "initial guess is not positive");
  int iter = 0;
  bool converged = false;
  for (; iter < config.max_newton; ++iter) {
    Vec h = B * c;
    for (int i = 0; i <= M; ++i) {
      double fi = f(nodes[static_cast<std::size_t>(i)]);
      for (int j = 0; j <= M; ++j) {
        double jk = static_cast<double>(j) * k;
        J(i, j) = (1.0 - jk * jk) * B(i, j) - (p - 1.0) * fi * std::pow(h[i], p - 2.0) * B(i, j);
      }
    }
    Vec step = J.partialPivLu().solve(F);
    // Backtracking on ||F||: the h^{p-1} term is stiff for large |p| and the
    // full step routinely overshoots.
    double f0 = F.norm();
    double alpha = 1.0;
    bool moved = false;
    for (int tries = 0; tries < 50; ++tries) {
      Vec cand = c - alpha * step;
      if (residual_vec(cand, Fcand) && Fcand.norm() <= (1.0 - 1e-4 * alpha) * f0) {
        c = cand;
        F = Fcand;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) fail(ErrorCode::NewtonDiverged, "Newton line search stalled");
    if (alpha * step.lpNorm<Eigen::Infinity>() < config.newton_tol ||
        F.lpNorm<Eigen::Infinity>() < 1e-13) {
      ++iter;
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(ErrorCode::NewtonDiverged, "Newton did not converge (suggest a smaller p-step)");

  PlanarSolution sol;
  sol.k = k;
  sol.p = p;
  sol.newton_iters = iter;
  sol.nodes = nodes;
  sol.coeffs.assign(c.data(), c.data() + M + 1);
  Vec h = B * c;
  sol.h_values.assign(h.data(), h.data() + M + 1);
  // Residual of the returned function on a fine arc grid (independent of the
  // collocation nodes).
  const double L = kPi / k;
  const int fine = 8 * (M + 1);
  double worst = 0.0;
  for (int i = 0; i <= fine; ++i) {
    double t = L * i / fine;
    double hv = sol.eval(t);
    if (!(hv > 0.0)) fail(ErrorCode::NonPositive, "solution lost positivity");
    double res = sol.eval_second_derivative(t) + hv - f(t) * std::pow(hv, p - 1.0);
    worst = std::max(worst, std::abs(res));
  }
  sol.residual = worst;
  if (sol.residual > config.residual_tol)
    fail(ErrorCode::NumericalFailure,
         "converged iterate exceeds the residual tolerance (insufficient modes)");
  return sol;
}

int planar_modes_hint(int k, double p) {
  int m = 32 + static_cast<int>(std::ceil(10.4 * std::abs(p) / k));
  return std::clamp(m, 64, 960);
}

namespace {

// Warm start carried between steps as an evaluable function, so the mode
// count may change along the way.
struct WarmState {
  bool have = false;
  PlanarSolution sol;
};

std::vector<double> resample(const WarmState& warm, const std::vector<double>& nodes) {
  std::vector<double> vals(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) vals[i] = warm.sol.eval(nodes[i]);
  return vals;
}

// Solve at one p, competing the warm start against fresh nontrivial seeds and
// keeping the solve with the largest F_p. Grows the mode count on resolution
// failures. Throws only if nothing converged.
PlanarSolution solve_competed(int k, const std::function<double(double)>& f, double p,
                              const WarmState& warm, const PlanarConfig& base) {
  PlanarConfig cfg = base;
  int modes = cfg.modes > 0 ? cfg.modes : planar_modes_hint(k, p);
  const double onset = 2.0 - static_cast<double>(k) * k;  // linearized bifurcation
  // Once the branch is well developed the warm start owns it; fresh seeds
  // only matter near the onset (and they are expensive at deep p).
  const bool fresh_seeds = !warm.have || (warm.sol.max_h() - warm.sol.min_h()) < 0.05;
  for (int grow = 0; grow < 3; ++grow) {
    std::vector<double> nodes = planar_nodes(k, modes);
    std::vector<std::vector<double>> seeds;
    if (warm.have) seeds.push_back(resample(warm, nodes));
    if (fresh_seeds) seeds.push_back(planar_init(k, PlanarBranch::Trivial, modes));
    if (fresh_seeds && p < onset - 0.5) {
      seeds.push_back(planar_init(k, PlanarBranch::Nontrivial, modes));
      for (double amp : {0.05, 0.15, 0.3}) {
        std::vector<double> s(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
          s[i] = 1.0 - amp * std::cos(static_cast<double>(k) * nodes[i]);
        seeds.push_back(std::move(s));
      }
    }
    bool resolution_failure = false;
    PlanarSolution best;
    double best_val = -std::numeric_limits<double>::max();
    for (const auto& seed : seeds) {
      try {
        PlanarSolution cand = solve_planar(k, f, p, seed, cfg);
        double v = cand.F_p_value(f, p);
        if (v > best_val) {
          best_val = v;
          best = std::move(cand);
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NumericalFailure) resolution_failure = true;
      }
    }
    if (best_val > -std::numeric_limits<double>::max()) return best;
    if (!resolution_failure) fail(ErrorCode::NewtonDiverged, "no seed converged");
    modes = std::min(960, modes * 4 / 3 + 16);
  }
  fail(ErrorCode::NumericalFailure, "planar solve failed at the mode cap");
}

double amplitude(const PlanarSolution& s) { return s.max_h() - s.min_h(); }

}  // namespace

std::vector<PlanarContinuationStep> continuation_planar(
    int k, const std::function<double(double)>& f, const std::vector<double>& p_schedule,
    const PlanarConfig& config) {
  if (p_schedule.empty()) fail(ErrorCode::ConfigInvalid, "empty schedule");
  for (std::size_t i = 1; i < p_schedule.size(); ++i)
    if (!(p_schedule[i] < p_schedule[i - 1]))
      fail(ErrorCode::ConfigInvalid, "p schedule must be strictly decreasing");
  const double onset = 2.0 - static_cast<double>(k) * k;

  std::vector<PlanarContinuationStep> steps;
  WarmState warm;
  for (std::size_t si = 0; si < p_schedule.size(); ++si) {
    const double p_target = p_schedule[si];
    double p_at = si == 0 ? std::min(-2.5, p_schedule[0] * 0.5) : p_schedule[si - 1];
    // If the branch is still trivial, walk through the onset in unit steps so
    // the mode seeds can capture the bifurcating branch close to where it is
    // born; warm tracking handles the rest.
    if ((!warm.have || amplitude(warm.sol) < 1e-8) && p_target < onset - 1.0) {
      double p_walk = std::max(p_at, onset - 1.0);
      while (p_walk > p_target + 1e-9) {
        PlanarSolution sol = solve_competed(k, f, p_walk, warm, config);
        warm.have = true;
        warm.sol = std::move(sol);
        if (amplitude(warm.sol) > 0.03) break;  // captured; jump tracking takes over
        p_walk -= 1.0;
      }
      p_at = std::min(p_at, warm.have ? warm.sol.p : p_at);
    }
    // Warm-tracked descent to the target with up to 3 step halvings.
    double p_from = warm.have ? warm.sol.p : p_at;
    if (p_from > p_target) {
      double p_try = p_target;
      int halvings = 0;
      for (;;) {
        bool ok = false;
        try {
          PlanarSolution sol = solve_competed(k, f, p_try, warm, config);
          // Falling back onto the trivial branch counts as a failed step.
          if (warm.have && amplitude(warm.sol) > 1e-4 && amplitude(sol) < 0.3 * amplitude(warm.sol))
            fail(ErrorCode::BranchLost, "branch amplitude collapsed");
          warm.have = true;
          warm.sol = std::move(sol);
          ok = true;
        } catch (const Error&) {
          ++halvings;
          if (halvings > 3) fail(ErrorCode::BranchLost, "Newton failed after 3 p-step halvings");
          p_try = 0.5 * (p_try + p_from);
        }
        if (ok) {
          if (p_try <= p_target + 1e-12) break;
          p_from = p_try;
          p_try = p_target;
          halvings = std::max(0, halvings - 1);  // progress earns budget back
        }
      }
    } else if (!warm.have) {
      warm.sol = solve_competed(k, f, p_target, warm, config);
      warm.have = true;
    }
    const PlanarSolution& best = warm.sol;
    PlanarContinuationStep step;
    step.p = p_target;
    step.max_h = best.max_h();
    step.min_h = best.min_h();
    step.dist_to_polygon = best.dist_to_polygon();
    step.residual = best.residual;
    step.newton_iters = best.newton_iters;
    step.solution = best;
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace minklab
