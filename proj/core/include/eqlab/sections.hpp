#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "eqlab/measure.hpp"
#include "eqlab/polynomial.hpp"
#include "eqlab/projective.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/stats.hpp"
#include "eqlab/test_function.hpp"

namespace eqlab {

enum class Field { Complex, Real };

std::string to_string(Field f);
Field field_from_string(const std::string& s);

/// l independent random sections of O(n) on P^k.
struct SectionEnsemble {
  std::size_t k = 1;
  int n = 1;
  std::size_t l = 1;
  Field field = Field::Complex;

  void validate() const;
};

/// sqrt(n! / prod alpha_i!), the norm-one rescaling of z^alpha for the
/// unitarily invariant inner product.
double kostlan_weight(const Monomial& alpha, std::size_t nvars);

/// One Kostlan form of degree n on P^k, any k >= 1.
FloatPoly sample_kostlan_form(std::size_t k, int n, Field field, Rng& rng);

/// Gaussian coefficients in the invariant orthonormal monomial basis.
std::vector<FloatPoly> sample_section(const SectionEnsemble& ens, Rng& rng);

enum class ZeroMethod { Direct, Crofton };

/// Common zero locus of l sections. Point sets (k = 1, or k = 2 with l = 2)
/// carry their atoms; a curve in P^2 is kept as its equation and paired by
/// Crofton slicing.
class ZeroSet {
 public:
  static ZeroSet from_points(EmpiricalMeasure points, std::size_t k, int n, std::size_t l);
  static ZeroSet from_curve(FloatPoly section);

  ZeroMethod method() const noexcept { return method_; }
  std::size_t dim() const noexcept { return k_; }
  int degree() const noexcept { return n_; }
  std::size_t codim() const noexcept { return l_; }

  /// Throws ContractError for a curve.
  const EmpiricalMeasure& points() const;
  /// Throws ContractError for a point set.
  const FloatPoly& curve() const;

 private:
  ZeroSet(ZeroMethod m, std::size_t k, int n, std::size_t l) : method_(m), k_(k), n_(n), l_(l) {}

  ZeroMethod method_;
  std::size_t k_;
  int n_;
  std::size_t l_;
  EmpiricalMeasure points_;
  std::optional<FloatPoly> curve_;
};

ZeroSet zero_set(const std::vector<FloatPoly>& sections, std::size_t k, Rng& rng);

inline constexpr std::size_t kDefaultCroftonLines = 2000;

/// <[Z], psi omega^{k-l}>. Exact weighted sum for point sets (zero standard
/// error); Crofton average over random lines for a curve. Lines lying inside
/// the curve are resampled; more than 1% of them raises DegenerateLineError.
Estimate pair_zero_current(const ZeroSet& zs, const TestFunction& psi, Rng& rng,
                           std::size_t m_lines = kDefaultCroftonLines);

/// n^{-l} <[Z], psi omega^{k-l}> - integral of psi against omega^k.
double discrepancy(const ZeroSet& zs, const TestFunction& psi, Rng& rng,
                   std::size_t m_lines = kDefaultCroftonLines);
double discrepancy(const std::vector<FloatPoly>& sections, std::size_t k, const TestFunction& psi,
                   Rng& rng, std::size_t m_lines = kDefaultCroftonLines);

/// D for every test function over `trials` independent sections at one degree.
/// d[p][t] belongs to psis[p] and trial t; trial t draws from rng.split(t).
struct DiscrepancySamples {
  SectionEnsemble ensemble;
  std::vector<std::string> psi_ids;
  std::vector<std::vector<double>> d;
};

DiscrepancySamples discrepancy_samples(const SectionEnsemble& ens, const std::vector<TestFunction>& psis,
                                       std::size_t trials, const Rng& rng, std::size_t workers = 1,
                                       std::size_t m_lines = kDefaultCroftonLines);

struct SpreadRow {
  int n = 0;
  double median_abs = 0.0;
  Estimate mean;
};

SpreadRow spread_row(int n, const std::vector<double>& d);

struct ConcentrationRow {
  int n = 0;
  std::size_t exceed = 0;
  std::size_t trials = 0;
  double probability = 0.0;
  Interval wilson;
  /// Zero exceedances: the probability column is the Wilson upper bound.
  bool upper_bound = false;
};

struct ConcentrationReport {
  double epsilon = 0.0;
  std::vector<ConcentrationRow> rows;
  /// Least-squares slope of log P against n, present when every cell is nonzero.
  std::optional<LinearFit> fit;
  /// Slope using Wilson upper bounds in place of zero cells.
  std::optional<LinearFit> bound_fit;
};

ConcentrationReport concentration_table(const std::vector<int>& n_grid,
                                        const std::vector<std::vector<double>>& d_per_n, double epsilon);

/// Runs discrepancy_samples along n_grid (trials >= 100) and tabulates P(|D| >= epsilon).
ConcentrationReport concentration_experiment(SectionEnsemble ens, const TestFunction& psi, double epsilon,
                                             const std::vector<int>& n_grid, std::size_t trials,
                                             const Rng& rng, std::size_t workers = 1);

struct ChordalBall {
  ProjectivePoint center;
  double radius = 1.0;

  bool contains(const ProjectivePoint& p) const { return chordal_distance(center, p) < radius; }
  double volume() const { return chordal_ball_volume(center.dim(), radius); }
};

struct VolumeCount {
  Estimate mean;      // ensemble mean of n^{-l} * #(Z cap U)
  double baseline = 0.0;
  /// Fubini-Study Monte Carlo estimate of the ball's volume.
  Estimate mc_volume;
};

/// Normalized zero count in a chordal ball. Needs k = l = 1 or k = l = 2.
VolumeCount volume_count(const SectionEnsemble& ens, const ChordalBall& region, std::size_t trials,
                         const Rng& rng, std::size_t workers = 1, std::size_t mc_samples = 100000);

}  // namespace eqlab
