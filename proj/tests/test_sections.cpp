#include <cmath>

#include <gtest/gtest.h>

#include "eqlab/errors.hpp"
#include "eqlab/parser.hpp"
#include "eqlab/sections.hpp"

using namespace eqlab;

namespace {

FloatPoly power_of_x0(std::size_t nvars, int n) {
  Monomial m{};
  m[0] = static_cast<std::uint16_t>(n);
  return FloatPoly::term(nvars, m, 1.0);
}

}  // namespace

TEST(KostlanWeight, MatchesMultinomialByHand) {
  EXPECT_NEAR(kostlan_weight({2, 2}, 2), std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(kostlan_weight({1, 1, 1}, 3), std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(kostlan_weight({5, 0}, 2), 1.0, 1e-12);
  // C(200, 100) = 9.0548514656103281e58
  EXPECT_NEAR(kostlan_weight({100, 100}, 2) / std::sqrt(9.0548514656103281e58), 1.0, 1e-12);
}

TEST(SampleSection, ShapeRealityAndDeterminism) {
  SectionEnsemble real{1, 6, 1, Field::Real};
  Rng a(42), b(42);
  const auto s = sample_section(real, a);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].degree(), 6);
  EXPECT_EQ(s[0].size(), 7u);
  for (const auto& [m, c] : s[0].terms()) EXPECT_EQ(c.imag(), 0.0);
  EXPECT_TRUE(s[0] == sample_section(real, b)[0]);

  SectionEnsemble pair{2, 3, 2, Field::Complex};
  Rng c(1);
  const auto t = sample_section(pair, c);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[1].size(), 10u);
}

TEST(SampleSection, RejectsInvalidEnsembles) {
  Rng rng(1);
  EXPECT_THROW(sample_section({1, 3, 2, Field::Complex}, rng), DimensionError);
  EXPECT_THROW(sample_section({3, 3, 1, Field::Complex}, rng), DimensionError);
  EXPECT_THROW(sample_section({1, 0, 1, Field::Complex}, rng), DimensionError);
}

// |z1|^2/|z|^2 is uniform on [0,1] under Fubini-Study on P^1 (Archimedes), so
// the chordal disc of radius r around [1:0] has mass r^2.
TEST(SampleSection, ExpectedRootCountInDiscIsInvariant) {
  const int n = 10;
  const double r = 0.6;
  const double expected = n * r * r;
  ChordalBall disc{ProjectivePoint{1.0, 0.0}, r};
  std::vector<double> counts;
  Rng rng(2024);
  for (int t = 0; t < 10000; ++t) {
    Rng tr = rng.split(t);
    const auto zs = zero_set(sample_section({1, n, 1, Field::Complex}, tr), 1, tr);
    counts.push_back(zs.points().integrate([&](const ProjectivePoint& p) { return disc.contains(p) ? 1.0 : 0.0; }));
  }
  const Estimate e = mean_estimate(counts);
  EXPECT_LE(e.z_score(expected), 3.0) << e.value << " vs " << expected;
}

TEST(ZeroSet, PurePowerHasOneHeavyRoot) {
  Rng rng(1);
  const auto zs = zero_set({power_of_x0(2, 7)}, 1, rng);
  ASSERT_EQ(zs.points().size(), 1u);
  EXPECT_TRUE(zs.points().atoms()[0].point == (ProjectivePoint{0.0, 1.0}));
  EXPECT_EQ(zs.points().atoms()[0].weight, 7.0);
}

TEST(ZeroSet, BezoutCountForPairs) {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto zs = zero_set(sample_section({2, 2, 2, Field::Complex}, rng), 2, rng);
    EXPECT_EQ(zs.points().total(), 4.0);
  }
}

TEST(ZeroSet, CurveHasNoPointList) {
  Rng rng(5);
  const auto zs = zero_set(sample_section({2, 3, 1, Field::Complex}, rng), 2, rng);
  EXPECT_EQ(zs.method(), ZeroMethod::Crofton);
  EXPECT_THROW(zs.points(), ContractError);
}

TEST(PairZeroCurrent, MassIsExact) {
  Rng rng(8);
  for (int n : {1, 5, 40}) {
    const auto zs = zero_set(sample_section({1, n, 1, Field::Real}, rng), 1, rng);
    EXPECT_EQ(pair_zero_current(zs, TestFunction::constant(1), rng).value, n);
  }
  const auto pts = zero_set(sample_section({2, 4, 2, Field::Complex}, rng), 2, rng);
  EXPECT_EQ(pair_zero_current(pts, TestFunction::constant(2), rng).value, 16.0);
}

TEST(PairZeroCurrent, CroftonMassIsDegreeOnEveryLine) {
  Rng rng(9);
  const auto zs = zero_set(sample_section({2, 6, 1, Field::Complex}, rng), 2, rng);
  const Estimate e = pair_zero_current(zs, TestFunction::constant(2), rng, 300);
  EXPECT_EQ(e.value, 6.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(PairZeroCurrent, ReducibleCurveMassIsDegree) {
  Rng rng(3);
  const FloatPoly p = parse_float_poly("x0*x1 - x0*x2", 3);
  const Estimate e = pair_zero_current(ZeroSet::from_curve(p), TestFunction::constant(2), rng, 100);
  EXPECT_EQ(e.value, 2.0);
}

TEST(Discrepancy, ExtremalSection) {
  Rng rng(1);
  const std::vector<FloatPoly> s{power_of_x0(2, 12)};
  EXPECT_EQ(pair_zero_current(zero_set(s, 1, rng), TestFunction::coordinate_weight(1, 0), rng).value, 0.0);
  EXPECT_DOUBLE_EQ(discrepancy(s, 1, TestFunction::coordinate_weight(1, 0), rng), -0.5);
}

TEST(Discrepancy, ConstantTestFunctionGivesZero) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto s = sample_section({1, 30, 1, Field::Complex}, rng);
    EXPECT_EQ(discrepancy(s, 1, TestFunction::constant(1), rng), 0.0);
  }
}

TEST(Discrepancy, EnsembleMeanIsZero) {
  const auto s = discrepancy_samples({1, 50, 1, Field::Complex}, {TestFunction::coordinate_weight(1, 0)}, 10000,
                                     Rng(77));
  const Estimate e = mean_estimate(s.d[0]);
  EXPECT_LE(e.z_score(0.0), 3.0) << e.value << " +- " << e.std_error;
}

// Every built-in psi on a grid of (k, n, l) and both fields.
TEST(Discrepancy, UnbiasedOnGrid) {
  struct Case {
    SectionEnsemble ens;
    std::size_t lines;
  };
  const std::vector<Case> grid{
      {{1, 10, 1, Field::Complex}, 0}, {{1, 40, 1, Field::Complex}, 0}, {{1, 10, 1, Field::Real}, 0},
      {{2, 3, 2, Field::Complex}, 0},  {{2, 2, 2, Field::Real}, 0},     {{2, 4, 1, Field::Complex}, 20},
  };
  std::uint64_t seed = 100;
  for (const auto& c : grid) {
    const auto s = discrepancy_samples(c.ens, builtin_test_functions(c.ens.k), 1000, Rng(seed++), 1,
                                       c.lines ? c.lines : kDefaultCroftonLines);
    for (std::size_t p = 0; p < s.d.size(); ++p) {
      const Estimate e = mean_estimate(s.d[p]);
      if (e.std_error < 1e-14) {
        EXPECT_LT(std::abs(e.value), 1e-12);
        continue;
      }
      EXPECT_LE(e.z_score(0.0), 4.0) << "k=" << c.ens.k << " n=" << c.ens.n << " l=" << c.ens.l << " "
                                     << to_string(c.ens.field) << " " << s.psi_ids[p];
    }
  }
}

TEST(Discrepancy, SpreadShrinksWhenDegreeDoubles) {
  for (Field f : {Field::Complex, Field::Real}) {
    double previous = INFINITY;
    for (int n : {25, 50, 100, 200}) {
      const auto s = discrepancy_samples({1, n, 1, f}, {TestFunction::coordinate_weight(1, 0)}, 500,
                                         Rng(9).split(static_cast<std::uint64_t>(n)));
      const double med = spread_row(n, s.d[0]).median_abs;
      EXPECT_LT(med, previous) << to_string(f) << " n=" << n;
      previous = med;
    }
  }
}

TEST(Discrepancy, SamplesIndependentOfWorkerCount) {
  const SectionEnsemble ens{1, 20, 1, Field::Complex};
  const auto a = discrepancy_samples(ens, builtin_test_functions(1), 64, Rng(4), 1);
  const auto b = discrepancy_samples(ens, builtin_test_functions(1), 64, Rng(4), 4);
  EXPECT_EQ(a.d, b.d);
}

TEST(Concentration, LargerEpsilonNeverExceedsMore) {
  const std::vector<int> grid{5, 10, 20};
  std::vector<std::vector<double>> cols;
  for (int n : grid)
    cols.push_back(discrepancy_samples({1, n, 1, Field::Complex}, {TestFunction::coordinate_weight(1, 0)}, 200,
                                       Rng(3).split(static_cast<std::uint64_t>(n)))
                       .d[0]);
  const auto small = concentration_table(grid, cols, 0.01);
  const auto large = concentration_table(grid, cols, 0.03);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_LE(large.rows[i].exceed, small.rows[i].exceed);
}

TEST(Concentration, ZeroCellsBecomeUpperBounds) {
  const auto rep = concentration_table({1, 2}, {{0.5, 0.0, 0.7}, {0.0, 0.0, 0.0}}, 0.1);
  EXPECT_FALSE(rep.rows[0].upper_bound);
  EXPECT_DOUBLE_EQ(rep.rows[0].probability, 2.0 / 3.0);
  EXPECT_TRUE(rep.rows[1].upper_bound);
  EXPECT_DOUBLE_EQ(rep.rows[1].probability, wilson_interval(0, 3).hi);
  EXPECT_FALSE(rep.fit.has_value());
  ASSERT_TRUE(rep.bound_fit.has_value());
}

TEST(Concentration, NeedsHundredTrials) {
  EXPECT_THROW(concentration_experiment({1, 5, 1, Field::Complex}, TestFunction::constant(1), 0.1, {5}, 99, Rng(1)),
               ContractError);
}

TEST(VolumeCount, HemisphereHoldsHalfTheZeros) {
  const ChordalBall half{ProjectivePoint{1.0, 0.0}, std::sqrt(0.5)};
  const auto v = volume_count({1, 100, 1, Field::Complex}, half, 400, Rng(12));
  EXPECT_NEAR(v.baseline, 0.5, 1e-15);
  EXPECT_NEAR(v.mean.value, 0.5, 0.02);
  EXPECT_NEAR(v.mc_volume.value, 0.5, 4 * v.mc_volume.std_error);
}

TEST(VolumeCount, WholeSpaceIsTheMass) {
  const ChordalBall all1{ProjectivePoint{1.0, 0.0}, 1.5};
  const auto v1 = volume_count({1, 30, 1, Field::Complex}, all1, 20, Rng(1), 1, 1000);
  EXPECT_EQ(v1.mean.value, 1.0);
  EXPECT_EQ(v1.mean.std_error, 0.0);
  // Normalized Fubini-Study volume: the limit constant is vol(U) itself.
  const ChordalBall all2{ProjectivePoint{1.0, 0.0, 0.0}, 1.5};
  const auto v2 = volume_count({2, 3, 2, Field::Complex}, all2, 20, Rng(1), 1, 1000);
  EXPECT_EQ(v2.mean.value, 1.0);
  EXPECT_EQ(v2.baseline, 1.0);
}
