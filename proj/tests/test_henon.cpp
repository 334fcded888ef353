#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "eqlab/elimination.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/henon.hpp"

using namespace eqlab;

namespace {

const RegularAutomorphism& standard() {
  static const RegularAutomorphism f = build_regular_automorphism("y^2 - 1.4", Complex(0.3, 0.0));
  return f;
}

std::vector<LinePair> pairs(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<LinePair> out;
  for (int i = 0; i < count; ++i) out.push_back(random_line_pair(rng));
  return out;
}

double distance(const Point2& a, const Point2& b) { return std::hypot(std::abs(a[0] - b[0]), std::abs(a[1] - b[1])); }

// l_L as a linear form in [x : y : t].
FloatPoly linear_form(const Line& l) {
  FloatPoly p(3, 1);
  p.add_term({1, 0, 0}, l.direction[1]);
  p.add_term({0, 1, 0}, -l.direction[0]);
  p.add_term({0, 0, 1}, l.direction[0] * l.point[1] - l.direction[1] * l.point[0]);
  return p;
}

double max_green(const HenonCloud& c, bool plus) {
  double g = 0.0;
  for (const Atom& a : c.measure.atoms()) {
    const Point2 q = affine_point(a.point);
    g = std::max(g, (plus ? green_plus(standard(), q, 40) : green_minus(standard(), q, 40)).value);
  }
  return g;
}

}  // namespace

TEST(Henon, QuadraticAndCubicExamples) {
  const auto f = build_regular_automorphism("y^2", GaussianRational(1));
  EXPECT_EQ(f.d_plus(), 2);
  EXPECT_EQ(f.d_minus(), 2);
  const auto g = build_regular_automorphism("y^3 - 1", GaussianRational(2));
  EXPECT_EQ(g.d_plus(), 3);
  const Point2 q{Complex(0.3, -0.2), Complex(-1.1, 0.4)};
  EXPECT_LT(distance(g.inverse(g.forward(q)), q), 1e-14);
  EXPECT_LT(distance(g.forward(g.inverse(q)), q), 1e-14);
}

TEST(Henon, RejectsDegenerateData) {
  EXPECT_THROW(build_regular_automorphism("y^2 + 1", GaussianRational(0)), ContractError);
  EXPECT_THROW(build_regular_automorphism("y + 1", GaussianRational(1)), DimensionError);
}

TEST(Henon, HomogenizationAgreesWithAffineMap) {
  const auto& f = standard();
  const Point2 q{Complex(0.4, 0.1), Complex(-0.7, 0.5)};
  const std::vector<Complex> z{q[0], q[1], 1.0};
  const auto h = to_float(f.forward_homogeneous()).evaluate(z);
  const Point2 fq = f.forward(q);
  EXPECT_LT(std::abs(h[0] / h[2] - fq[0]), 1e-14);
  EXPECT_LT(std::abs(h[1] / h[2] - fq[1]), 1e-14);
  const auto g = to_float(f.inverse_homogeneous()).evaluate(z);
  const Point2 gq = f.inverse(q);
  EXPECT_LT(std::abs(g[0] / g[2] - gq[0]), 1e-14);
  EXPECT_LT(std::abs(g[1] / g[2] - gq[1]), 1e-14);
}

TEST(Henon, CountsAreProductsOfDegrees) {
  const auto& f = standard();
  for (const LinePair& pair : pairs(11, 2))
    for (int n = 1; n <= 3; ++n)
      for (int m = 1; m <= 3; ++m) {
        const HenonCloud c = line_intersection_cloud(f, n, m, pair);
        const int expected = 1 << (n + m);
        EXPECT_EQ(c.raw_count, expected) << n << " " << m;
        EXPECT_EQ(static_cast<int>(c.measure.atoms().size()), expected) << n << " " << m;
        EXPECT_NEAR(c.measure.total(), 1.0, 1e-12);
      }
  const auto g = build_regular_automorphism("y^3 - 1", GaussianRational(2));
  EXPECT_EQ(line_intersection_cloud(g, 1, 1, pairs(12, 1)[0]).raw_count, 9);
}

TEST(Henon, AtomsLieOnBothCurves) {
  const auto& f = standard();
  const LinePair pair = pairs(13, 1)[0];
  const HenonCloud c = line_intersection_cloud(f, 2, 3, pair);
  for (const Atom& a : c.measure.atoms()) {
    Point2 fwd = affine_point(a.point), back = fwd;
    for (int i = 0; i < 2; ++i) fwd = f.forward(fwd);
    for (int i = 0; i < 3; ++i) back = f.inverse(back);
    const double sf = 1.0 + std::abs(fwd[0]) + std::abs(fwd[1]);
    const double sb = 1.0 + std::abs(back[0]) + std::abs(back[1]);
    EXPECT_LT(std::abs(pair.L.equation(fwd)) / sf, 1e-8);
    EXPECT_LT(std::abs(pair.L_prime.equation(back)) / sb, 1e-8);
  }
}

// Independent oracle: common zeros in P^2 of l_L o f and l_L' o f^{-1}.
TEST(Henon, MatchesPlaneIntersectionSolver) {
  const auto& f = standard();
  const LinePair pair = pairs(14, 1)[0];
  const FloatPoly p = substitute(linear_form(pair.L), to_float(f.forward_homogeneous()).components());
  const FloatPoly q = substitute(linear_form(pair.L_prime), to_float(f.inverse_homogeneous()).components());
  Rng rng(15);
  const std::vector<Root> oracle = bivariate_common_zeros(p, q, rng);
  ASSERT_EQ(total_multiplicity(oracle), 4);
  const HenonCloud c = line_intersection_cloud(f, 1, 1, pair);
  ASSERT_EQ(c.measure.atoms().size(), 4u);
  for (const Root& r : oracle) {
    double best = 1.0;
    for (const Atom& a : c.measure.atoms()) best = std::min(best, chordal_distance(a.point, r.point));
    EXPECT_LT(best, 1e-8);
  }
}

TEST(Henon, IntersectionPolynomialLeadingCoefficient) {
  const auto& f = standard();
  const LinePair pair = pairs(16, 1)[0];
  const auto coeffs = intersection_polynomial(f, 1, 2, pair);
  ASSERT_EQ(coeffs.size(), 9u);
  // Y_{j+1} = Y_j^2 + lower terms, so the top coefficient is -dir_x(L) dir_y(L')^8.
  const Complex expected = -pair.L.direction[0] * std::pow(pair.L_prime.direction[1], 8);
  EXPECT_LT(std::abs(coeffs.back().to_complex() - expected), 1e-12 * std::abs(expected));
}

TEST(Henon, CostGuardAndDegenerateLines) {
  const auto& f = standard();
  LinePair pair = pairs(17, 1)[0];
  EXPECT_THROW(line_intersection_cloud(f, 7, 6, pair), CostGuardError);
  EXPECT_THROW(line_intersection_cloud(f, 0, 1, pair), ContractError);
  pair.L.direction[0] = 0.0;  // vertical line: the top coefficient vanishes
  EXPECT_THROW(line_intersection_cloud(f, 1, 1, pair), DegenerateLineError);
}

TEST(Henon, BoxTestFunctions) {
  const auto psis = box_test_functions();
  EXPECT_EQ(psis.size(), 7u);
  EXPECT_DOUBLE_EQ(psis[0](Point2{0.0, 0.0}), 1.0);
  for (const auto& psi : psis) EXPECT_EQ(psi(Point2{Complex(3.5, 0.0), 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(psis[6](Point2{Complex(0.0, 1.5), 0.0}), std::pow(0.75, 3) * 2.25);
}

TEST(Henon, GapIsASymmetricDistance) {
  const auto& f = standard();
  const auto ps = pairs(18, 2);
  const auto psis = box_test_functions();
  const HenonCloud a = line_intersection_cloud(f, 2, 2, ps[0]);
  const HenonCloud b = line_intersection_cloud(f, 2, 2, ps[1]);
  EXPECT_EQ(equidistribution_gap({a, a}, psis), 0.0);
  EXPECT_EQ(equidistribution_gap({a, b}, psis), equidistribution_gap({b, a}, psis));
  EXPECT_GT(equidistribution_gap({a, b}, psis), 0.0);
  EXPECT_THROW(equidistribution_gap({a}, psis), ContractError);
}

TEST(Henon, GapShrinksWithDepth) {
  const auto ps = pairs(19, 4);
  const auto psis = box_test_functions();
  const double g1 = equidistribution_gap(standard(), 1, 1, ps, psis);
  const double g3 = equidistribution_gap(standard(), 3, 3, ps, psis);
  EXPECT_LT(g3, g1);
}

TEST(Henon, GreenFunctionExamples) {
  const auto& f = standard();
  // y^2 - 1.4 = 1.3 y has the root -0.7, so (-0.7, -0.7) is fixed.
  const Point2 fixed{-0.7, -0.7};
  EXPECT_LT(distance(f.forward(fixed), fixed), 1e-15);
  EXPECT_LT(green_plus(f, fixed, 40).value, 1e-9);
  EXPECT_LT(green_minus(f, fixed, 40).value, 1e-9);

  const Point2 far{0.0, 1e6};
  EXPECT_NEAR(green_plus(f, far, 40).value, std::log(1e6), 1.0);

  for (const Point2& q : {Point2{Complex(0.3, 0.1), Complex(0.7, -0.2)}, Point2{Complex(2.0, 1.0), Complex(-1.5, 0.5)}}) {
    EXPECT_NEAR(green_plus(f, f.forward(q), 40).value, 2.0 * green_plus(f, q, 40).value, 1e-6);
    EXPECT_NEAR(green_minus(f, f.inverse(q), 40).value, 2.0 * green_minus(f, q, 40).value, 1e-6);
  }
  EXPECT_THROW(green_plus(f, far, kMaxGreenDepth + 1), ContractError);
}

TEST(Henon, GreenFunctionsShrinkOnDeeperClouds) {
  const auto ps = pairs(20, 4);
  double previous_plus = 1e300, previous_minus = 1e300;
  for (int n = 1; n <= 3; ++n) {
    double gp = 0.0, gm = 0.0;
    for (const LinePair& pair : ps) {
      const HenonCloud c = line_intersection_cloud(standard(), n, n, pair);
      gp = std::max(gp, max_green(c, true));
      gm = std::max(gm, max_green(c, false));
    }
    EXPECT_LT(gp, previous_plus) << n;
    EXPECT_LT(gm, previous_minus) << n;
    previous_plus = gp;
    previous_minus = gm;
  }
}
