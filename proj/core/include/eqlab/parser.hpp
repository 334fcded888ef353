#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eqlab/polynomial.hpp"

namespace eqlab {

// Grammar (whitespace ignored):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*     division only by nonzero constants
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' integer)?
//   atom   := number | variable | 'i' | '(' expr ')'
//   number := digits ('.' digits)? | digits '/' digits   (inside a term, '/' divides)
// Variables are x0..x{nvars-1}; 'i' is the imaginary unit.

/// Parses and expands a homogeneous polynomial with exact coefficients.
ExactPoly parse_poly(std::string_view text, std::size_t nvars);

/// Same, for custom variable names.
ExactPoly parse_poly(std::string_view text, const std::vector<std::string>& names);

FloatPoly parse_float_poly(std::string_view text, std::size_t nvars);

/// Map from component texts; components must share a degree.
ExactMap parse_map(const std::vector<std::string>& components, std::size_t nvars);

/// Coefficients c_0..c_d of a univariate polynomial in `name` (need not be homogeneous).
std::vector<GaussianRational> parse_univariate(std::string_view text, const std::string& name);

}  // namespace eqlab
