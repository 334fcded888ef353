#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eqlab/measure.hpp"
#include "eqlab/polynomial.hpp"
#include "eqlab/projective.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/stats.hpp"

namespace eqlab {

using PointSampler = std::function<ProjectivePoint(Rng&)>;

PointSampler fs_sampler(std::size_t k);
PointSampler real_fs_sampler(std::size_t k);
/// Draws atoms with probability proportional to their weights.
PointSampler empirical_sampler(const EmpiricalMeasure& mu);

enum class Normalization { None, MaxZero, MeanZero };

std::string to_string(Normalization n);

/// value(z) = (1/n) log(|f(z)| / |z|^n) + shift for a form f of degree n.
struct QpshWitness {
  FloatPoly f;
  double shift = 0.0;
  Normalization normalization = Normalization::None;
  double shift_std_error = 0.0;  // Monte Carlo error of a mean-zero shift
  std::optional<ProjectivePoint> argmax;  // best point found by a max-zero normalization

  /// Needs a nonzero form of degree >= 1.
  explicit QpshWitness(FloatPoly poly, double s = 0.0);

  std::size_t k() const noexcept { return f.nvars() - 1; }
  int degree() const noexcept { return f.degree(); }
  /// Value without the shift; -inf on the zero set.
  double raw(const ProjectivePoint& z) const;
  double value(const ProjectivePoint& z) const { return raw(z) + shift; }
};

/// K given by a membership test and a sampler of its points. Local search for
/// a sup moves along real directions when `real` is set.
struct CompactSet {
  std::string name;
  std::function<bool(const ProjectivePoint&)> contains;
  PointSampler sample;
  bool real = false;
};

CompactSet whole_space(std::size_t k);
CompactSet real_points(std::size_t k);
/// {z_i = 0} in P^k.
CompactSet coordinate_hyperplane(std::size_t k, std::size_t i);
CompactSet chordal_ball_set(const ProjectivePoint& center, double radius);

inline constexpr int kSupRefinementRounds = 50;
inline constexpr std::size_t kMinMeanSamples = 10000;

struct SupEstimate {
  double sup = 0.0;
  ProjectivePoint argmax{1.0, 0.0};
};

/// sup_K value by sampling followed by 50 rounds of local search with a
/// halving chordal radius around the best samples. A stored argmax lying in
/// K is always a candidate. Throws ContractError if K yields no points.
SupEstimate estimate_sup(const QpshWitness& w, const CompactSet& K, std::size_t n_samples, Rng& rng);

/// max_zero: shift = -sup over P^k (mu unused); mean_zero: shift = -mean of
/// the raw value under mu, needing n_samples >= 10^4.
QpshWitness normalize_qpsh(const QpshWitness& w, Normalization mode, const PointSampler& mu, std::size_t n_samples,
                           Rng& rng);

struct R1Audit {
  std::size_t k = 1;
  double bound = 0.0;      // (1 + log k) / 2
  double threshold = 0.0;  // bound + 0.05
  double max_sup = 0.0;
  std::vector<double> sups;
  bool pass = false;
};

/// Max over mean-zero normalized witnesses (log-moduli of Kostlan sections with
/// degrees drawn from degree_pool) of their estimated sup. Witness i uses
/// rng.split(i).
R1Audit r1_bound_audit(std::size_t k, std::size_t n_witnesses, const std::vector<int>& degree_pool, const Rng& rng,
                       std::size_t workers = 1);

struct ModerateIntegral {
  Estimate estimate;
  /// The largest 0.1% of the integrand samples carry more than half the sum.
  bool heavy_tail = false;
};

/// Monte Carlo estimate of int exp(-alpha value) dmu for a max-zero witness,
/// alpha in (0, 1].
ModerateIntegral moderate_integral(const PointSampler& mu, const QpshWitness& w, double alpha, std::size_t n_samples,
                                   Rng& rng);

struct ExceedanceRow {
  double t = 0.0;
  std::size_t count = 0;
  std::size_t trials = 0;
  double probability = 0.0;
  Interval wilson;
};

struct ExceedanceProfile {
  std::vector<ExceedanceRow> rows;
  /// Slope of log probability against t over the nonzero rows (two or more).
  std::optional<LinearFit> fit;
  /// Same with Wilson upper bounds standing in for zero rows.
  std::optional<LinearFit> bound_fit;
};

/// mu(value < -t) along an increasing positive t grid for a mean-zero witness.
ExceedanceProfile exceedance_profile(const PointSampler& mu, const QpshWitness& w, const std::vector<double>& t_grid,
                                     std::size_t n_samples, Rng& rng);

/// Pointwise maximum of several profiles on the same grid, the empirical form
/// of sup over witnesses of mu(value < -t).
ExceedanceProfile exceedance_envelope(const std::vector<ExceedanceProfile>& profiles);

struct CapacityBound {
  double bound = 1.0;
  std::vector<double> sups;  // estimated sup_K value per witness
};

/// min over max-zero witnesses of exp(sup_K value), clamped to [0, 1]. An
/// upper bound on cap(K) since the infimum runs over a subfamily.
CapacityBound capacity_upper_bound(const CompactSet& K, const std::vector<QpshWitness>& witnesses,
                                   std::size_t n_samples, Rng& rng);

struct PotentialValue {
  double value = 0.0;
  bool atom_hit = false;  // value is -inf
};

/// u(x) = sum w_i log d(x, p_i) for a measure on P^1.
PotentialValue chordal_potential_eval(const EmpiricalMeasure& nu, const ProjectivePoint& x);

}  // namespace eqlab
