#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "eqlab/errors.hpp"
#include "eqlab/measure.hpp"
#include "eqlab/projective.hpp"
#include "eqlab/stats.hpp"
#include "eqlab/test_function.hpp"

using namespace eqlab;

namespace {

double mean_of(const TestFunction& psi, std::size_t k, std::size_t n, Rng& rng, bool real) {
  RunningStats s;
  for (std::size_t i = 0; i < n; ++i) s.add(psi(real ? sample_point_real(k, rng) : sample_point_fs(k, rng)));
  return s.mean();
}

// log C(n, k) through lgamma, independent of the big-integer route.
double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

TEST(ProjectivePoint, NormalizedForm) {
  ProjectivePoint p{Complex(0, 0), Complex(0, 3), Complex(4, 0)};
  EXPECT_NEAR(euclidean_norm(p.coords()), 1.0, 1e-15);
  EXPECT_EQ(p[0], Complex(0, 0));
  EXPECT_DOUBLE_EQ(p[1].imag(), 0.0);
  EXPECT_GT(p[1].real(), 0.0);
  ProjectivePoint q{Complex(0, 0), Complex(0, 6), Complex(8, 0)};
  EXPECT_TRUE(p == q);
}

TEST(ProjectivePoint, RejectsZeroVector) {
  EXPECT_THROW(ProjectivePoint({0.0, 0.0}), DimensionError);
  EXPECT_THROW(ProjectivePoint({1.0}), DimensionError);
}

TEST(ProjectivePoint, ScalingByComplexGivesSamePoint) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    auto p = sample_point_fs(3, rng);
    std::vector<Complex> z(p.coords().begin(), p.coords().end());
    for (auto& c : z) c *= Complex(3, 4);
    EXPECT_TRUE(ProjectivePoint(z) == p);
  }
}

TEST(ChordalDistance, RangeSymmetryAndIdentity) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto p = sample_point_fs(2, rng), q = sample_point_fs(2, rng);
    const double d = chordal_distance(p, q);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_NEAR(d, chordal_distance(q, p), 1e-14);
    EXPECT_LT(chordal_distance(p, p), 1e-15);
    const double overlap = std::abs(hermitian_product(p.coords(), q.coords()));
    EXPECT_NEAR(d, std::sqrt(std::max(0.0, 1.0 - overlap * overlap)), 1e-12);
  }
  EXPECT_NEAR(chordal_distance(ProjectivePoint{1.0, 0.0}, ProjectivePoint{0.0, 1.0}), 1.0, 1e-15);
}

TEST(ChordalDistance, ResolvesNearbyPoints) {
  ProjectivePoint p{1.0, 0.0};
  ProjectivePoint q{1.0, 1e-9};
  EXPECT_NEAR(chordal_distance(p, q), 1e-9, 1e-18);
}

TEST(Perturb, ExactDistanceAndRealness) {
  Rng rng(5);
  for (double r : {1e-8, 1e-3, 0.3, 0.9}) {
    auto p = sample_point_fs(2, rng);
    EXPECT_NEAR(chordal_distance(p, perturb(p, r, rng)), r, 1e-12);
    auto x = sample_point_real(3, rng);
    auto y = perturb(x, r, rng, true);
    EXPECT_TRUE(y.is_real());
    EXPECT_NEAR(chordal_distance(x, y), r, 1e-12);
  }
}

TEST(SamplePointFs, CoordinateWeightMeans) {
  Rng rng(2024);
  EXPECT_NEAR(mean_of(TestFunction::coordinate_weight(1, 0), 1, 1000000, rng, false), 0.5, 0.002);
  EXPECT_NEAR(mean_of(TestFunction::coordinate_weight(2, 0), 2, 1000000, rng, false), 1.0 / 3.0, 0.002);
}

TEST(SamplePointFs, DeterministicForSeed) {
  Rng a(42), b(42);
  EXPECT_TRUE(sample_point_fs(3, a) == sample_point_fs(3, b));
  Rng c(42);
  auto first = sample_point_fs(3, c);
  Rng d = Rng(42).split(7), e = Rng(42).split(7);
  EXPECT_TRUE(sample_point_fs(3, d) == sample_point_fs(3, e));
  EXPECT_FALSE(sample_point_fs(3, c) == first);
}

TEST(SamplePointReal, RealAndSymmetric) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    auto p = sample_point_real(1, rng);
    for (const Complex& c : p.coords()) EXPECT_EQ(c.imag(), 0.0);
    // Distance to the conjugate point is zero on RP^k.
    std::vector<Complex> conj(p.coords().begin(), p.coords().end());
    for (auto& c : conj) c = std::conj(c);
    EXPECT_LT(chordal_distance(p, ProjectivePoint(conj)), 1e-15);
  }
  EXPECT_NEAR(mean_of(TestFunction::coordinate_weight(2, 0), 2, 1000000, rng, true), 1.0 / 3.0, 0.002);
}

TEST(SamplePointFs, UnitaryInvariance) {
  Rng rng(77);
  const auto u = random_unitary(3, rng);
  const std::size_t n = 20000;
  for (const auto& psi : builtin_test_functions(2)) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(psi(sample_point_fs(2, rng)));
      b.push_back(psi(transform(u, sample_point_fs(2, rng))));
    }
    EXPECT_LE(ks_statistic(a, b), 4.0 / std::sqrt(static_cast<double>(n))) << psi.id();
  }
}

TEST(RandomUnitary, IsUnitary) {
  Rng rng(1);
  for (int n : {2, 3, 5}) {
    auto u = random_unitary(static_cast<std::size_t>(n), rng);
    EXPECT_LT((u * u.adjoint() - Eigen::MatrixXcd::Identity(n, n)).norm(), 1e-13);
  }
}

TEST(TestFunctions, CoordinateWeightsSumToOne) {
  Rng rng(9);
  for (std::size_t k : {1u, 2u, 3u}) {
    const auto psis = coordinate_weights(k);
    for (int i = 0; i < 10000; ++i) {
      auto p = sample_point_fs(k, rng);
      double s = 0.0;
      for (const auto& psi : psis) s += psi(p);
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(TestFunctions, ClosedFormIntegralsMatchMonteCarlo) {
  // Oracle: plain Monte Carlo against both invariant measures.
  Rng rng(31);
  const std::size_t n = 400000;
  for (std::size_t k : {1u, 2u}) {
    std::vector<TestFunction> fs = builtin_test_functions(k);
    fs.push_back(TestFunction::quartic_weight(k, 0, 1));
    fs.push_back(TestFunction::quartic_weight(k, 1, 1));
    fs.push_back(TestFunction::constant(k));
    for (const auto& psi : fs) {
      RunningStats c, r;
      for (std::size_t i = 0; i < n; ++i) {
        c.add(psi(sample_point_fs(k, rng)));
        r.add(psi(sample_point_real(k, rng)));
      }
      EXPECT_LT(c.estimate().z_score(*psi.fs_integral()), 4.5) << psi.id() << " k=" << k;
      EXPECT_LT(r.estimate().z_score(*psi.real_fs_integral()), 4.5) << psi.id() << " k=" << k;
    }
  }
}

TEST(TestFunctions, IdRoundTrip) {
  for (const auto& psi : builtin_test_functions(2)) EXPECT_EQ(TestFunction::from_id(psi.id(), 2).id(), psi.id());
  EXPECT_EQ(TestFunction::from_id("quartic12", 2).id(), "quartic12");
  EXPECT_THROW(TestFunction::from_id("psi9", 2), DimensionError);
  EXPECT_THROW(TestFunction::from_id("bogus", 2), Error);
}

TEST(SphereLogModulus, WithinFourStandardErrors) {
  const double expected[] = {-0.5, -0.75, -11.0 / 12.0};
  Rng rng(123);
  for (std::size_t k = 1; k <= 3; ++k) {
    EXPECT_DOUBLE_EQ(sphere_log_modulus_exact(k), expected[k - 1]);
    auto est = sphere_log_modulus_integral(k, 1000000, rng);
    EXPECT_LT(est.z_score(expected[k - 1]), 4.0) << "k=" << k;
  }
}

TEST(SphereLogModulus, RejectsTooFewSamples) {
  Rng rng(1);
  EXPECT_THROW(sphere_log_modulus_integral(1, 999, rng), std::invalid_argument);
}

TEST(MultiprojNormalization, Examples) {
  EXPECT_DOUBLE_EQ(multiproj_normalization(1, 1), 1.0);
  EXPECT_NEAR(multiproj_normalization(1, 2), std::pow(2.0, -0.5), 1e-14);
  EXPECT_NEAR(multiproj_normalization(2, 2), std::pow(6.0, -0.25), 1e-14);
}

TEST(MultiprojNormalization, BoundedByOneAndMatchesLogGammaOracle) {
  for (int k = 1; k <= 8; ++k) {
    for (int l = 1; l <= 8; ++l) {
      double log_product = 0.0;
      for (int j = 2; j <= l; ++j) log_product += log_binomial(j * k, k);
      const double oracle = std::exp(-log_product / (k * l));
      const double c = multiproj_normalization(k, l);
      EXPECT_LE(c, 1.0);
      EXPECT_NEAR(c, oracle, 1e-10 * oracle);
    }
  }
}

TEST(ChordalBall, VolumeMatchesMonteCarlo) {
  Rng rng(4);
  const auto center = sample_point_fs(2, rng);
  for (double r : {0.3, 0.7}) {
    std::size_t hits = 0;
    const std::size_t n = 200000;
    for (std::size_t i = 0; i < n; ++i) hits += chordal_distance(center, sample_point_fs(2, rng)) < r;
    const auto ci = wilson_interval(hits, n, 4.0);
    EXPECT_GE(chordal_ball_volume(2, r), ci.lo);
    EXPECT_LE(chordal_ball_volume(2, r), ci.hi);
  }
  EXPECT_DOUBLE_EQ(chordal_ball_volume(1, 1.0), 1.0);
  EXPECT_NEAR(chordal_ball_volume(1, std::sqrt(0.5)), 0.5, 1e-15);
}

TEST(EmpiricalMeasure, TotalsPairingAndNormalization) {
  EmpiricalMeasure mu;
  mu.add(ProjectivePoint{1.0, 0.0}, 2.0);
  mu.add(ProjectivePoint{0.0, 1.0}, 6.0);
  EXPECT_DOUBLE_EQ(mu.total(), 8.0);
  EXPECT_DOUBLE_EQ(mu.pair(TestFunction::coordinate_weight(1, 0)), 2.0);
  mu.normalize();
  EXPECT_DOUBLE_EQ(mu.total(), 1.0);
  EXPECT_THROW(mu.add(ProjectivePoint{1.0, 0.0}, -1.0), Error);
  EXPECT_THROW(mu.add(ProjectivePoint{1.0, 0.0, 0.0}, 1.0), DimensionError);
}

TEST(EmpiricalMeasure, BinaryRoundTrip) {
  Rng rng(6);
  EmpiricalMeasure mu;
  for (int i = 0; i < 50; ++i) mu.add(sample_point_fs(2, rng), rng.uniform());
  std::stringstream buf;
  write_point_list(buf, mu);
  const auto back = read_point_list(buf);
  ASSERT_EQ(back.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    EXPECT_EQ(back.atoms()[i].weight, mu.atoms()[i].weight);
    EXPECT_TRUE(back.atoms()[i].point == mu.atoms()[i].point);
  }
  std::stringstream bad("XXXX");
  EXPECT_THROW(read_point_list(bad), Error);
}
