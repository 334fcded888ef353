#pragma once

#include <optional>
#include <vector>

#include "eqlab/polynomial.hpp"

namespace eqlab {

/// a / b when b divides a exactly, otherwise nullopt.
std::optional<ExactPoly> try_divide(const ExactPoly& a, const ExactPoly& b);

/// a / b; throws when the division is not exact.
ExactPoly exact_divide(const ExactPoly& a, const ExactPoly& b);

/// Greatest common divisor normalized to a leading coefficient of 1 (the
/// leading term in graded revlex order). gcd(0, 0) is 0.
ExactPoly poly_gcd(const ExactPoly& a, const ExactPoly& b);
ExactPoly poly_gcd(const std::vector<ExactPoly>& polys);

/// Divides every component by the gcd of the components.
ExactMap reduce_map(const ExactMap& f);

/// f o g expanded exactly and divided by the gcd of its components. The
/// result has reduced() == true and its degree is the algebraic degree of the
/// composite.
ExactMap compose_and_reduce(const ExactMap& f, const ExactMap& g);

/// Degree sequences need exact gcds, which floating coefficients cannot give.
FloatMap compose_and_reduce(const FloatMap& f, const FloatMap& g) = delete;

}  // namespace eqlab
