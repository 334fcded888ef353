#pragma once

#include <span>
#include <vector>

#include "eqlab/polynomial.hpp"

namespace eqlab {

/// Radius (chordal) within which numerical roots are merged into one root.
inline constexpr double kRootClusterRadius = 1e-6;

struct Root {
  ProjectivePoint point;
  int multiplicity = 1;
};

/// Finite roots of c_0 + c_1 z + ... + c_d z^d with c_d != 0, c_0 != 0, one per
/// multiplicity. Above degree 40 Aberth iterations start from the Newton
/// polygon; otherwise (or if they stall) companion-matrix eigenvalues are
/// polished by Aberth iterations.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs);

/// Dense coefficients of a binary form: c_j multiplies x0^j x1^(d-j).
std::vector<Complex> binary_form_coefficients(const FloatPoly& p);

/// Roots in P^1 of a binary form counted with multiplicity; the multiplicities
/// sum to the degree. Roots at [0:1] and [1:0] come from exact zero coefficients.
std::vector<Root> univariate_roots(const FloatPoly& p);
std::vector<Root> univariate_roots(const ExactPoly& p);
std::vector<Root> univariate_roots_dense(std::span<const Complex> coeffs);

/// Merges points within `radius` of each other (single linkage).
std::vector<Root> cluster_points(const std::vector<ProjectivePoint>& points,
                                 double radius = kRootClusterRadius);

/// Each root repeated by its multiplicity.
std::vector<ProjectivePoint> expand_roots(const std::vector<Root>& roots);

int total_multiplicity(const std::vector<Root>& roots);

/// |p(z)| / |coeffs| at the unit representative of a root.
double relative_residual(const FloatPoly& p, const ProjectivePoint& z);

struct LineRestriction {
  FloatPoly poly;          // q(s, t) = p(s a + t b) in variables (s, t)
  bool vanishes = false;   // the line lies inside the zero set of p
};

/// Restriction of p to the line through a and b.
LineRestriction restrict_to_line(const FloatPoly& p, const ProjectivePoint& a, const ProjectivePoint& b);

}  // namespace eqlab
