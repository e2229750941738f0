#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace minklab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kGolden = 1.61803398874989484820;

inline Vec unit(const Vec& v) { return v / v.norm(); }

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

inline Vec vec4(double x, double y, double z, double w) {
  Vec v(4);
  v << x, y, z, w;
  return v;
}

/// Unit vector on S^1 at the given angle.
inline Vec s1_point(double theta) { return vec2(std::cos(theta), std::sin(theta)); }

/// Unit vector on S^2 from polar angle theta (from +z) and azimuth phi.
inline Vec s2_point(double theta, double phi) {
  return vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
}

/// Order-fixed pairwise summation; bit-stable for a fixed term order.
double pairwise_sum(const std::vector<double>& terms);

/// Lexicographic comparison with tolerance (entries equal within tol compare equal).
int lex_compare(const Vec& a, const Vec& b, double tol);

/// Affine rank of a point set (number of independent directions among p_i - p_0).
int affine_rank(const std::vector<Vec>& pts, double tol = 1e-9);

/// Deterministic 64-bit mix used to derive per-task seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// Halton sequence entry (base must be prime), used for quasi-random starts.
double halton(std::uint64_t index, std::uint64_t base);

}  // namespace minklab
