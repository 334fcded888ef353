#pragma once

#include <vector>

#include "eqlab/polynomial.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/roots.hpp"

namespace eqlab {

/// Sylvester resultant of p, q in C[x0,x1][x2] with respect to x2: a binary
/// form in (x0, x1) of degree deg p * deg q. Requires the x2^deg coefficients
/// of p and q to be nonzero constants.
ExactPoly resultant_x2(const ExactPoly& p, const ExactPoly& q);
FloatPoly resultant_x2(const FloatPoly& p, const FloatPoly& q);

/// Exact resultant after an integer shear that makes x2 leading for both
/// inputs. Identically zero exactly when p and q share a factor.
ExactPoly sheared_resultant(const ExactPoly& p, const ExactPoly& q);

bool share_factor(const ExactPoly& p, const ExactPoly& q);

/// p(U y) for a 3x3 matrix U.
FloatPoly change_frame(const FloatPoly& p, const Eigen::MatrixXcd& u);

/// Common zeros in P^2 of two coprime homogeneous polynomials, counted with
/// multiplicity (the multiplicities sum to deg p * deg q). Works in a random
/// unitary frame and retries up to three frames before giving up.
std::vector<Root> bivariate_common_zeros(const FloatPoly& p, const FloatPoly& q, Rng& rng);

/// Exact inputs: common factors are detected exactly before solving.
std::vector<Root> bivariate_common_zeros(const ExactPoly& p, const ExactPoly& q, Rng& rng);

/// max(|p|, |q|) at the unit representative, each scaled by its coefficient norm.
double common_zero_residual(const FloatPoly& p, const FloatPoly& q, const ProjectivePoint& z);

}  // namespace eqlab
