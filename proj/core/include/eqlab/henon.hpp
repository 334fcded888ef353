#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "eqlab/gaussian_rational.hpp"
#include "eqlab/measure.hpp"
#include "eqlab/polynomial.hpp"
#include "eqlab/rng.hpp"

namespace eqlab {

using Point2 = std::array<Complex, 2>;

/// Hénon map f(x, y) = (y, p(y) - a x) with inverse g(x, y) = ((p(x) - y) / a, x).
class RegularAutomorphism {
 public:
  /// Coefficients p_0..p_d of p; needs d >= 2 and a != 0. The identity
  /// f o g = g o f = id is checked exactly on the homogenized maps of P^2.
  RegularAutomorphism(std::vector<GaussianRational> p, GaussianRational a);

  int d_plus() const noexcept { return degree_; }
  int d_minus() const noexcept { return degree_; }
  const std::vector<GaussianRational>& p() const noexcept { return p_; }
  const GaussianRational& a() const noexcept { return a_; }

  Point2 forward(const Point2& q) const;
  Point2 inverse(const Point2& q) const;

  /// [x : y : t] homogenizations of f and its inverse.
  const ExactMap& forward_homogeneous() const noexcept { return forward_h_; }
  const ExactMap& inverse_homogeneous() const noexcept { return inverse_h_; }

  Complex p_value(Complex y) const;
  Complex p_derivative(Complex y) const;

 private:
  std::vector<GaussianRational> p_;
  GaussianRational a_;
  int degree_;
  std::vector<Complex> pf_;
  Complex af_;
  ExactMap forward_h_;
  ExactMap inverse_h_;
};

/// Parses p in the variable y and builds the automorphism.
RegularAutomorphism build_regular_automorphism(const std::string& p_text, Complex a);
RegularAutomorphism build_regular_automorphism(const std::string& p_text, const GaussianRational& a);

/// Affine line {point + s direction} in C^2.
struct Line {
  Point2 point;
  Point2 direction;

  /// Linear form vanishing on the line: dir_y (x - p_x) - dir_x (y - p_y).
  Complex equation(const Point2& q) const;
  Point2 at(Complex s) const { return {point[0] + s * direction[0], point[1] + s * direction[1]}; }
};

struct LinePair {
  Line L;
  Line L_prime;
};

/// Line through a complex Gaussian point with a complex Gaussian direction.
Line random_line(Rng& rng);
LinePair random_line_pair(Rng& rng);

/// Point of C^2 as [x : y : 1] in P^2 and back.
ProjectivePoint embed(const Point2& q);
Point2 affine_point(const ProjectivePoint& p);

struct HenonCloud {
  EmpiricalMeasure measure;  // atoms [x : y : 1], total weight 1
  int raw_count = 0;         // intersection points counted with multiplicity
  int n = 0;
  int m = 0;
};

inline constexpr long kHenonBezoutLimit = 4096;

/// Normalized intersection cloud of f^{-n}(L) and f^m(L'). Points are
/// q = f^m(u(t)) for the roots t of P(t) = l_L(f^{n+m}(u(t))), u(t) running
/// over L'. P is built exactly; its roots are polished against the dynamics.
/// Throws CostGuardError if d_plus^n d_minus^m > 4096 and DegenerateLineError
/// when P loses degree (the pair meets an exceptional direction).
HenonCloud line_intersection_cloud(const RegularAutomorphism& f, int n, int m, const LinePair& pair);

/// Exact coefficients of P(t) for the same system, lowest degree first.
std::vector<GaussianRational> intersection_polynomial(const RegularAutomorphism& f, int n, int m,
                                                      const LinePair& pair);

/// Smooth bump supported in the box [-3, 3]^4 of C^2 = R^4 times a low-degree
/// polynomial factor.
class BoxTestFunction {
 public:
  enum class Factor { One, ReX, ImX, ReY, ImY, ReXY, AbsX2 };

  explicit BoxTestFunction(Factor factor) : factor_(factor) {}
  double operator()(const Point2& q) const;
  double operator()(const ProjectivePoint& p) const { return (*this)(affine_point(p)); }
  std::string id() const;

 private:
  Factor factor_;
};

std::vector<BoxTestFunction> box_test_functions();

/// max over pairs of clouds and test functions of |<cloud_i - cloud_j, psi>|.
double equidistribution_gap(const std::vector<HenonCloud>& clouds, const std::vector<BoxTestFunction>& psis);
double equidistribution_gap(const RegularAutomorphism& f, int n, int m, const std::vector<LinePair>& pairs,
                            const std::vector<BoxTestFunction>& psis);

struct GreenEstimate {
  double value = 0.0;
  /// |G_depth - G_{depth-1}|, the change made by the last step.
  double increment = 0.0;
};

inline constexpr int kMaxGreenDepth = 60;

/// G^+(q) ~ d^{-n} log+ |f^n(q)|; an orbit that escapes past 1e8 is finished
/// with the escape-rate tail log|lc| / (d - 1), so no overflow is possible.
GreenEstimate green_plus(const RegularAutomorphism& f, const Point2& q, int depth);
GreenEstimate green_minus(const RegularAutomorphism& f, const Point2& q, int depth);

}  // namespace eqlab
