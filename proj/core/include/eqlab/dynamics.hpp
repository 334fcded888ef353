#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "eqlab/measure.hpp"
#include "eqlab/polynomial.hpp"
#include "eqlab/projective.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/roots.hpp"
#include "eqlab/stats.hpp"
#include "eqlab/test_function.hpp"

namespace eqlab {

/// Reduced rational self-map of P^1 or P^2.
class RationalSelfMap {
 public:
  /// Divides out the gcd of the components. Needs k + 1 components in k + 1
  /// variables with k in {1, 2} and algebraic degree >= 1.
  explicit RationalSelfMap(const ExactMap& map);

  std::size_t k() const noexcept { return k_; }
  int algebraic_degree() const noexcept { return exact_.degree(); }
  const ExactMap& exact() const noexcept { return exact_; }
  const FloatMap& map() const noexcept { return float_; }
  bool is_identity() const noexcept { return identity_; }

  /// Image; throws IndeterminacyError on the indeterminacy locus.
  ProjectivePoint apply(const ProjectivePoint& x) const;
  /// |f(x)| relative to the coefficient scale at the unit representative.
  double image_size(const ProjectivePoint& x) const;

  /// Dense binary-form coefficients of the two components (k = 1 only).
  const std::vector<Complex>& dense(std::size_t component) const { return dense_[component]; }

  static RationalSelfMap identity(std::size_t k);

 private:
  ExactMap exact_;
  FloatMap float_;
  std::size_t k_;
  bool identity_ = false;
  double scale_ = 1.0;
  std::vector<std::vector<Complex>> dense_;
};

/// f = h^{-1} o g, whose graph is {(x, y) : g(x) = h(y)}. A plain map is the
/// case h = identity.
class Correspondence {
 public:
  Correspondence(RationalSelfMap g, RationalSelfMap h);
  Correspondence(RationalSelfMap f);  // NOLINT: maps are correspondences

  const RationalSelfMap& g() const noexcept { return g_; }
  const RationalSelfMap& h() const noexcept { return h_; }
  std::size_t k() const noexcept { return g_.k(); }
  bool is_map() const noexcept { return h_.is_identity(); }

 private:
  RationalSelfMap g_;
  RationalSelfMap h_;
};

/// Points x with f(x) = y, counted with multiplicity. On P^1 these are the
/// roots of f0(x) y1 - f1(x) y0; on P^2 the common zeros of w1.f and w2.f for
/// two independent w annihilating y, with indeterminacy points removed.
/// Correspondences pull back h(y) under g.
std::vector<Root> preimages(const Correspondence& f, const ProjectivePoint& y, Rng& rng);

/// Same, but throws ExceptionalPointError unless the multiplicities add up to
/// `expected`.
std::vector<Root> preimages(const Correspondence& f, const ProjectivePoint& y, int expected, Rng& rng);

/// Common preimage count over random targets. Targets whose fibers have a
/// multiple point or touch the indeterminacy locus are deficient and ignored;
/// the others must agree.
int topological_degree(const Correspondence& f, Rng& rng, std::size_t trials = 8);

struct BackwardSample {
  EmpiricalMeasure measure;  // probability weights 1 / n_samples
  std::size_t aborted = 0;   // paths restarted after hitting an exceptional point
};

/// Independent backward paths from x0: at depth step j the point is replaced
/// by a preimage under schedule[depth-1-j] (or the single map of a constant
/// schedule), chosen uniformly by multiplicity. Sample s uses rng.split(s).
/// More than 1% aborted paths raises ExceptionalPointError.
BackwardSample backward_orbit_sample(const std::vector<Correspondence>& schedule, const ProjectivePoint& x0,
                                     std::size_t depth, std::size_t n_samples, const Rng& rng,
                                     std::size_t workers = 1);

struct DefectResult {
  double defect = 0.0;
  std::vector<double> per_psi;  // signed <d^{-1} f^* mu - mu, psi>
  std::size_t skipped = 0;      // atoms with an exceptional fiber
};

/// max over psi of |d^{-1} int sum_{x in f^{-1}(y)} psi(x) dmu(y) - int psi dmu|.
DefectResult invariance_defect(const Correspondence& f, const EmpiricalMeasure& mu,
                               const std::vector<TestFunction>& psis, const Rng& rng, std::size_t workers = 1);

/// The same quantity for mu_n = d^{-n} (f^n)^* delta_{x0}, estimated by coupled
/// paths: one from x0 and one from a uniformly chosen preimage of x0 whose
/// choices at every step follow the nearest-point matching of the two fibers.
/// Both ends are exact samples of mu_n and mu_{n+1}, and their difference
/// shrinks as the inverse branches contract, so the estimate stays resolved
/// at depths where independent clouds only show sampling noise.
DefectResult coupled_invariance_defect(const Correspondence& f, const ProjectivePoint& x0, std::size_t depth,
                                       std::size_t n_samples, const std::vector<TestFunction>& psis,
                                       const Rng& rng, std::size_t workers = 1);

struct MixingResult {
  std::vector<Estimate> correlations;  // I_0 .. I_{n_max}
  std::size_t dropped = 0;             // atoms whose forward orbit hit indeterminacy
};

/// I_n = mean over atoms of phi * (psi o f^n) minus the product of the means.
MixingResult mixing_correlations(const RationalSelfMap& f, const EmpiricalMeasure& mu, const TestFunction& phi,
                                 const TestFunction& psi, std::size_t n_max);

/// The same correlations through the transfer operator,
/// I_n = int (L^n phi - <mu, phi>)(psi - <mu, psi>) dmu with
/// L phi(y) = d^{-1} sum_{f(x) = y} phi(x); maps of P^1 only, n_max <= 14.
MixingResult transfer_correlations(const RationalSelfMap& f, const EmpiricalMeasure& mu, const TestFunction& phi,
                                   const TestFunction& psi, std::size_t n_max, std::size_t workers = 1);

/// Least-squares slope of log|I_n| against n over n = first..last, skipping
/// exact zeros.
std::optional<LinearFit> decay_fit(const MixingResult& m, std::size_t first, std::size_t last);

struct DegreeGrowth {
  std::vector<int> degrees;   // deg f, deg f^2, ...
  std::vector<double> roots;  // deg(f^n)^{1/n}
  int topological_degree = 0;
  /// d_{k-1} < d_t: the last root estimates d_1 on P^2; on P^1 d_0 = 1.
  bool d1_below_dt = false;
};

inline constexpr std::size_t kMaxDegreeGrowthSteps = 8;

/// Exact iterates by composition and gcd reduction. Throws CostGuardError for
/// n_max > 8 or when an iterate grows beyond `max_terms` terms.
DegreeGrowth degree_growth(const RationalSelfMap& f, std::size_t n_max, Rng& rng,
                           std::size_t max_terms = 200000);

}  // namespace eqlab
