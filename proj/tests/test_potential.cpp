#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "eqlab/errors.hpp"
#include "eqlab/parser.hpp"
#include "eqlab/potential.hpp"
#include "eqlab/sections.hpp"

using namespace eqlab;

namespace {

QpshWitness witness(const std::string& text, std::size_t nvars) { return QpshWitness(to_float(parse_poly(text, nvars))); }

QpshWitness max_zero(const QpshWitness& w, Rng& rng) {
  return normalize_qpsh(w, Normalization::MaxZero, fs_sampler(w.k()), 2000, rng);
}

QpshWitness mean_zero(const QpshWitness& w, const PointSampler& mu, Rng& rng, std::size_t n = 100000) {
  return normalize_qpsh(w, Normalization::MeanZero, mu, n, rng);
}

// |z0|^2 / |z|^2 is Beta(1, k) under the Fubini-Study measure, so
// int (|z0|/|z|)^{-alpha} = k B(1 - alpha/2, k).
double fs_moderation_oracle(std::size_t k, double alpha) {
  return static_cast<double>(k) * std::beta(1.0 - alpha / 2.0, static_cast<double>(k));
}

// On RP^1, |x0|/|x| = |cos theta| with theta uniform.
double real_moderation_oracle(double alpha) {
  return std::tgamma((1.0 - alpha) / 2.0) / (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - alpha / 2.0));
}

}  // namespace

TEST(Witness, ValueIsScaleInvariantAndInfiniteOnZeros) {
  const QpshWitness w = witness("x0^2 + 3*x1*x2", 3);
  EXPECT_EQ(w.k(), 2u);
  EXPECT_EQ(w.degree(), 2);
  const ProjectivePoint p{1.0, Complex(0.5, 0.2), -2.0};
  const ProjectivePoint q{Complex(0.0, 3.0), Complex(0.0, 3.0) * Complex(0.5, 0.2), Complex(0.0, -6.0)};
  EXPECT_NEAR(w.value(p), w.value(q), 1e-14);
  EXPECT_EQ(w.raw(ProjectivePoint{0.0, 1.0, 0.0}), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(QpshWitness(FloatPoly(2, 2)), ZeroPolynomialError);
  EXPECT_THROW(w.raw(ProjectivePoint{1.0, 0.0}), DimensionError);
}

TEST(Normalize, PurePowerHasZeroMax) {
  Rng rng(1);
  const QpshWitness w = max_zero(witness("x0^5", 2), rng);
  EXPECT_LE(std::abs(w.shift), 1e-12);
  EXPECT_EQ(w.normalization, Normalization::MaxZero);
  ASSERT_TRUE(w.argmax.has_value());
}

// max |st| on |s|^2 + |t|^2 = 1 is 1/2.
TEST(Normalize, ProductOfCoordinatesOracle) {
  Rng rng(2);
  const QpshWitness w = max_zero(witness("x0^2*x1^2", 2), rng);
  EXPECT_NEAR(-w.shift, 0.5 * std::log(0.5), 1e-6);
}

TEST(Normalize, ValuesStayBelowShift) {
  Rng rng(3);
  for (int n : {1, 4, 9}) {
    const QpshWitness w = max_zero(QpshWitness(sample_kostlan_form(2, n, Field::Complex, rng)), rng);
    for (int i = 0; i < 10000; ++i) EXPECT_LE(w.value(sample_point_fs(2, rng)), 1e-9);
  }
}

TEST(Normalize, MeanZeroMatchesSphereIntegral) {
  Rng rng(4);
  for (std::size_t k = 1; k <= 3; ++k) {
    const QpshWitness w = mean_zero(witness("x0", k + 1), fs_sampler(k), rng);
    EXPECT_LE(std::abs(w.shift + sphere_log_modulus_exact(k)), 4.0 * w.shift_std_error) << k;
  }
}

TEST(Normalize, RepeatedNormalizationIsIdempotent) {
  Rng rng(5);
  const QpshWitness base(sample_kostlan_form(1, 6, Field::Complex, rng));
  const QpshWitness m1 = mean_zero(base, fs_sampler(1), rng);
  const QpshWitness m2 = mean_zero(m1, fs_sampler(1), rng);
  EXPECT_LE(std::abs(m1.shift - m2.shift), 4.0 * std::hypot(m1.shift_std_error, m2.shift_std_error));
  const QpshWitness z1 = max_zero(m2, rng);
  const QpshWitness z2 = max_zero(z1, rng);
  EXPECT_NEAR(z1.shift, z2.shift, 1e-9);
  EXPECT_THROW(normalize_qpsh(base, Normalization::MeanZero, fs_sampler(1), 9999, rng), ContractError);
}

TEST(R1Audit, SingleMaxZeroWitnessHasZeroSup) {
  Rng rng(6);
  const QpshWitness w = max_zero(QpshWitness(sample_kostlan_form(2, 3, Field::Complex, rng)), rng);
  const double s = estimate_sup(w, whole_space(2), 500, rng).sup;
  EXPECT_GE(s, 0.0);
  EXPECT_LE(s, 1e-12);
}

TEST(R1Audit, BoundHoldsOnP1) {
  const R1Audit a = r1_bound_audit(1, 200, {1, 2, 3, 5, 8}, Rng(7));
  EXPECT_DOUBLE_EQ(a.bound, 0.5);
  EXPECT_EQ(a.sups.size(), 200u);
  EXPECT_LE(a.max_sup, 0.55);
  EXPECT_TRUE(a.pass);
}

TEST(R1Audit, BoundFormula) {
  const R1Audit a = r1_bound_audit(2, 4, {2}, Rng(8));
  EXPECT_NEAR(a.bound, 0.8466, 1e-4);
  EXPECT_NEAR(a.threshold, a.bound + 0.05, 1e-15);
}

TEST(R1Audit, WorkerCountDoesNotMatter) {
  const R1Audit a = r1_bound_audit(2, 12, {1, 3}, Rng(9), 1);
  const R1Audit b = r1_bound_audit(2, 12, {1, 3}, Rng(9), 3);
  EXPECT_EQ(a.sups, b.sups);
}

TEST(Moderation, PurePowerOracles) {
  Rng rng(10);
  for (std::size_t k = 1; k <= 2; ++k) {
    const QpshWitness w = max_zero(witness("x0^3", k + 1), rng);
    const ModerateIntegral m = moderate_integral(fs_sampler(k), w, 0.5, 200000, rng);
    EXPECT_LE(m.estimate.z_score(fs_moderation_oracle(k, 0.5)), 4.0) << k;
    EXPECT_FALSE(m.heavy_tail);
  }
  EXPECT_NEAR(fs_moderation_oracle(1, 0.5), 4.0 / 3.0, 1e-12);
  const QpshWitness w = max_zero(witness("x0", 2), rng);
  const ModerateIntegral real = moderate_integral(real_fs_sampler(1), w, 0.5, 200000, rng);
  EXPECT_LE(real.estimate.z_score(real_moderation_oracle(0.5)), 4.0);
}

TEST(Moderation, SmallAlphaTendsToOneAndGrowsWithAlpha) {
  Rng rng(11);
  const QpshWitness w = max_zero(QpshWitness(sample_kostlan_form(2, 4, Field::Complex, rng)), rng);
  EXPECT_NEAR(moderate_integral(fs_sampler(2), w, 1e-6, 10000, rng).estimate.value, 1.0, 1e-4);
  double previous = 0.0;
  for (double alpha : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    Rng same(12);  // common random numbers make the comparison exact
    const double v = moderate_integral(fs_sampler(2), w, alpha, 20000, same).estimate.value;
    EXPECT_GE(v, previous);
    EXPECT_TRUE(std::isfinite(v));
    previous = v;
  }
}

TEST(Moderation, Preconditions) {
  Rng rng(13);
  const QpshWitness raw = witness("x0", 2);
  EXPECT_THROW(moderate_integral(fs_sampler(1), raw, 0.5, 100, rng), ContractError);
  const QpshWitness w = max_zero(raw, rng);
  EXPECT_THROW(moderate_integral(fs_sampler(1), w, 0.0, 100, rng), ContractError);
  EXPECT_THROW(moderate_integral(fs_sampler(1), w, 1.5, 100, rng), ContractError);
}

TEST(Moderation, HeavyTailFlag) {
  Rng rng(14);
  const QpshWitness w = max_zero(witness("x0", 2), rng);
  EmpiricalMeasure nu;
  nu.add(ProjectivePoint{1e-8, 1.0}, 0.0005);
  nu.add(ProjectivePoint{1.0, 1.0}, 0.9995);
  EXPECT_TRUE(moderate_integral(empirical_sampler(nu), w, 1.0, 100000, rng).heavy_tail);
}

TEST(Moderation, GrowsAtMostLinearlyInK) {
  Rng rng(15);
  std::vector<double> est;
  for (std::size_t k = 1; k <= 3; ++k) {
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const QpshWitness w = max_zero(QpshWitness(sample_kostlan_form(k, 1 + i, Field::Complex, rng)), rng);
      worst = std::max(worst, moderate_integral(fs_sampler(k), w, 0.5, 20000, rng).estimate.value);
    }
    est.push_back(worst);
  }
  for (std::size_t k = 2; k <= 3; ++k) EXPECT_LE(est[k - 1], static_cast<double>(k) * est[0]);
}

// For x0 on P^1, |z0|^2/|z|^2 is uniform and the mean of log(|z0|/|z|) is -1/2,
// so mu(value < -t) = exp(-1 - 2t).
TEST(Exceedance, LinearFormOracleOnP1) {
  Rng rng(16);
  const QpshWitness w = mean_zero(witness("x0", 2), fs_sampler(1), rng, 1000000);
  const std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  const ExceedanceProfile prof = exceedance_profile(fs_sampler(1), w, grid, 400000, rng);
  for (std::size_t i = 0; i < prof.rows.size(); ++i) {
    const ExceedanceRow& r = prof.rows[i];
    const double oracle = std::min(1.0, std::exp(-1.0 - 2.0 * r.t));
    const Interval ci = wilson_interval(r.count, r.trials, 4.0);
    EXPECT_GE(oracle, ci.lo - 2e-4) << r.t;  // allowance for the estimated shift
    EXPECT_LE(oracle, ci.hi + 2e-4) << r.t;
    if (i > 0) EXPECT_LE(r.probability, prof.rows[i - 1].probability);
  }
  EXPECT_LE(prof.rows.front().probability, 1.0);
  ASSERT_TRUE(prof.fit.has_value());
  EXPECT_NEAR(prof.fit->slope, -2.0, 0.15);
}

// On RP^1 the mean of log|cos theta| is -log 2, so
// m(value < -t) = (2/pi) asin(exp(-t) / 2).
TEST(Exceedance, LinearFormOracleOnRP1) {
  Rng rng(17);
  const QpshWitness w = mean_zero(witness("x0", 2), real_fs_sampler(1), rng, 1000000);
  const ExceedanceProfile prof = exceedance_profile(real_fs_sampler(1), w, {0.5, 1.0, 2.0, 3.0, 4.0}, 400000, rng);
  for (const ExceedanceRow& r : prof.rows) {
    const double oracle = 2.0 / std::numbers::pi * std::asin(std::exp(-r.t) / 2.0);
    const Interval ci = wilson_interval(r.count, r.trials, 4.0);
    EXPECT_GE(oracle, ci.lo - 2e-4) << r.t;
    EXPECT_LE(oracle, ci.hi + 2e-4) << r.t;
  }
  ASSERT_TRUE(prof.fit.has_value());
  EXPECT_NEAR(prof.fit->slope, -1.0, 0.1);
}

// Degree-20 witnesses decay so fast (about exp(-40 t)) that their tail is
// only resolved on small t.
TEST(Exceedance, HighDegreeWitnessesDecayExponentially) {
  Rng rng(18);
  std::vector<ExceedanceProfile> profiles;
  const std::vector<double> grid{0.05, 0.1, 0.15, 0.2, 0.25};
  for (int i = 0; i < 5; ++i) {
    const QpshWitness w = mean_zero(QpshWitness(sample_kostlan_form(1, 20, Field::Complex, rng)), fs_sampler(1), rng,
                                    20000);
    profiles.push_back(exceedance_profile(fs_sampler(1), w, grid, 100000, rng));
  }
  const ExceedanceProfile env = exceedance_envelope(profiles);
  ASSERT_TRUE(env.fit.has_value());
  EXPECT_LE(env.fit->slope, -0.5);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (const auto& p : profiles) EXPECT_GE(env.rows[i].probability, p.rows[i].probability);
}

TEST(Exceedance, Preconditions) {
  Rng rng(19);
  const QpshWitness w = mean_zero(witness("x0", 2), fs_sampler(1), rng, 10000);
  EXPECT_THROW(exceedance_profile(fs_sampler(1), w, {1.0, 0.5}, 100, rng), ContractError);
  EXPECT_THROW(exceedance_profile(fs_sampler(1), witness("x0", 2), {1.0}, 100, rng), ContractError);
}

TEST(Capacity, WholeSpaceIsExactlyOne) {
  Rng rng(20);
  for (std::size_t k = 1; k <= 3; ++k) {
    std::vector<QpshWitness> ws;
    for (int i = 0; i < 5; ++i) ws.push_back(max_zero(QpshWitness(sample_kostlan_form(k, 1 + i, Field::Complex, rng)), rng));
    EXPECT_EQ(capacity_upper_bound(whole_space(k), ws, 500, rng).bound, 1.0) << k;
  }
}

TEST(Capacity, LineIsPluripolar) {
  Rng rng(21);
  const QpshWitness w = max_zero(witness("x0", 3), rng);
  const CapacityBound b = capacity_upper_bound(coordinate_hyperplane(2, 0), {w}, 500, rng);
  EXPECT_EQ(b.bound, 0.0);
  EXPECT_EQ(b.sups.front(), -std::numeric_limits<double>::infinity());
}

TEST(Capacity, AntitoneOnNestedBalls) {
  Rng rng(22);
  std::vector<QpshWitness> ws;
  for (int i = 0; i < 6; ++i) ws.push_back(max_zero(QpshWitness(sample_kostlan_form(2, 2, Field::Complex, rng)), rng));
  const ProjectivePoint c{1.0, 0.2, Complex(0.0, 0.3)};
  double previous = 0.0;
  for (double r : {0.1, 0.3, 0.6, 0.9}) {
    const double b = capacity_upper_bound(chordal_ball_set(c, r), ws, 2000, rng).bound;
    EXPECT_GE(b, previous - 1e-9) << r;
    previous = b;
  }
}

TEST(Capacity, RealProjectiveSpacesAgree) {
  auto bound = [](std::size_t k) {
    Rng rng(23);
    std::vector<QpshWitness> ws;
    for (int i = 0; i < 40; ++i) {
      const int n = 1 + static_cast<int>(rng.below(4));
      ws.push_back(max_zero(QpshWitness(sample_kostlan_form(k, n, Field::Real, rng)), rng));
    }
    return capacity_upper_bound(real_points(k), ws, 2000, rng).bound;
  };
  const double b2 = bound(2), b3 = bound(3);
  EXPECT_LT(b2, 1.0);
  EXPECT_NEAR(b2, b3, 0.05);
}

TEST(Capacity, Preconditions) {
  Rng rng(24);
  EXPECT_THROW(capacity_upper_bound(whole_space(1), {}, 10, rng), ContractError);
  EXPECT_THROW(capacity_upper_bound(whole_space(1), {witness("x0", 2)}, 10, rng), ContractError);
  CompactSet empty{"empty", [](const ProjectivePoint&) { return false; }, fs_sampler(1), false};
  EXPECT_THROW(capacity_upper_bound(empty, {max_zero(witness("x0", 2), rng)}, 10, rng), ContractError);
}

TEST(ChordalPotential, Examples) {
  EmpiricalMeasure delta;
  delta.add(ProjectivePoint{0.0, 1.0}, 1.0);
  EXPECT_NEAR(chordal_potential_eval(delta, ProjectivePoint{1.0, 0.0}).value, 0.0, 1e-15);
  const PotentialValue hit = chordal_potential_eval(delta, ProjectivePoint{0.0, 1.0});
  EXPECT_TRUE(hit.atom_hit);
  EXPECT_EQ(hit.value, -std::numeric_limits<double>::infinity());
  EXPECT_THROW(chordal_potential_eval(delta, ProjectivePoint{1.0, 0.0, 0.0}), DimensionError);
}

// Under Fubini-Study on P^1, d(x, y)^2 is uniform, so int log d = -1/2.
TEST(ChordalPotential, FubiniStudyLogKernelConstant) {
  Rng rng(25);
  EmpiricalMeasure nu;
  for (int i = 0; i < 10000; ++i) nu.add(sample_point_fs(1, rng), 1e-4);
  const ProjectivePoint x{Complex(0.3, 0.8), Complex(-0.6, 0.1)};
  const PotentialValue u = chordal_potential_eval(nu, x);
  EXPECT_FALSE(u.atom_hit);
  EXPECT_NEAR(u.value, -0.5, 0.01);
  for (int i = 0; i < 100; ++i) EXPECT_LE(chordal_potential_eval(nu, sample_point_fs(1, rng)).value, 0.0);
}

TEST(Samplers, EmpiricalSamplerFollowsWeights) {
  EmpiricalMeasure nu;
  nu.add(ProjectivePoint{1.0, 0.0}, 0.25);
  nu.add(ProjectivePoint{0.0, 1.0}, 0.75);
  const PointSampler s = empirical_sampler(nu);
  Rng rng(26);
  int first = 0;
  for (int i = 0; i < 40000; ++i) first += s(rng) == ProjectivePoint{1.0, 0.0};
  EXPECT_NEAR(first / 40000.0, 0.25, 0.01);
  EXPECT_THROW(empirical_sampler(EmpiricalMeasure{}), ContractError);
}
