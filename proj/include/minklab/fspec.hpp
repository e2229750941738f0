#pragma once

#include <string>

#include "minklab/functionals.hpp"
#include "minklab/symmetry.hpp"

namespace minklab {

/// Parses an arithmetic expression over the ambient coordinates
/// (x, y, z, w or x0..x3), with + - * / ^ (integer powers), parentheses,
/// unary minus, numeric literals and the functions exp, cos, sin, abs, sqrt.
/// Returns a positive callable; evaluation errors surface at call time.
std::function<double(const Vec&)> parse_expression(const std::string& expr, int dim);

/// Density from a formula, symmetrized over the group orbit:
/// f(x) = (1/|G|) sum_phi expr(phi^T x). Invariance holds by construction.
DensitySpec density_from_formula(const std::string& expr, const SymmetryGroup& group,
                                 const SphereGrid& grid);

/// Density from tabulated node values (must match the grid); invariance is
/// checked against the group within `tol` (nearest-node transport).
DensitySpec density_from_table(const std::vector<double>& values, const SymmetryGroup& group,
                               const SphereGrid& grid, double tol = 1e-6);

}  // namespace minklab
