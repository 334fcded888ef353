#include "eqlab/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>

#include "eqlab/elimination.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/gcd.hpp"
#include "eqlab/parallel.hpp"

namespace eqlab {

namespace {

constexpr double kIndeterminacyTolerance = 1e-7;
constexpr double kFiberTolerance = 1e-6;
constexpr std::size_t kMaxPathAttempts = 10;

ExactMap checked(const ExactMap& map) {
  if (map.size() != map.nvars() || (map.nvars() != 2 && map.nvars() != 3))
    throw DimensionError("self-maps act on P^1 or P^2 and need k + 1 components in k + 1 variables");
  ExactMap r = reduce_map(map);
  if (r.degree() < 1) throw DimensionError("a constant map is not dominant");
  return r;
}

std::vector<Complex> cross(std::span<const Complex> a, std::span<const Complex> b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

ExactPoly pencil(const ExactMap& f, const std::vector<Complex>& w) {
  ExactPoly out(f.nvars(), f.degree());
  for (std::size_t i = 0; i < w.size(); ++i) out += f[i] * GaussianRational::from_double(w[i]);
  return out;
}

std::vector<Root> fiber_p1(const RationalSelfMap& g, const ProjectivePoint& y) {
  const auto& a = g.dense(0);
  const auto& b = g.dense(1);
  std::vector<Complex> c(a.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = y[1] * a[j] - y[0] * b[j];
  return univariate_roots_dense(c);
}

std::vector<Root> fiber_p2(const RationalSelfMap& g, const ProjectivePoint& y, Rng& rng) {
  std::vector<Complex> r1{rng.complex_normal(), rng.complex_normal(), rng.complex_normal()};
  std::vector<Complex> r2{rng.complex_normal(), rng.complex_normal(), rng.complex_normal()};
  const ExactPoly e1 = pencil(g.exact(), cross(y.coords(), r1));
  const ExactPoly e2 = pencil(g.exact(), cross(y.coords(), r2));
  std::vector<Root> out;
  for (Root& root : bivariate_common_zeros(e1, e2, rng)) {
    if (g.image_size(root.point) <= kIndeterminacyTolerance) continue;
    if (chordal_distance(g.apply(root.point), y) > kFiberTolerance) continue;
    out.push_back(std::move(root));
  }
  return out;
}

const Root& pick(const std::vector<Root>& roots, Rng& rng) {
  std::size_t u = rng.below(static_cast<std::size_t>(total_multiplicity(roots)));
  for (const Root& r : roots) {
    if (u < static_cast<std::size_t>(r.multiplicity)) return r;
    u -= static_cast<std::size_t>(r.multiplicity);
  }
  return roots.back();
}

int expected_degree(const Correspondence& f, const Rng& rng) {
  if (f.k() == 1) return f.g().algebraic_degree();
  Rng r = rng.split(~std::uint64_t{0});
  return topological_degree(f, r);
}

std::vector<ProjectivePoint> expand(const std::vector<Root>& roots) { return expand_roots(roots); }

// Bijection between two fibers of equal size, greedily pairing the closest points.
std::vector<std::size_t> nearest_matching(const std::vector<ProjectivePoint>& a,
                                          const std::vector<ProjectivePoint>& b) {
  const std::size_t d = a.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) pairs.emplace_back(chordal_distance(a[i], b[j]), i, j);
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::size_t> match(d, d);
  std::vector<bool> used(d, false);
  for (const auto& [dist, i, j] : pairs) {
    if (match[i] != d || used[j]) continue;
    match[i] = j;
    used[j] = true;
  }
  return match;
}

// Weighted covariance with the standard error of its mean-of-products form.
Estimate weighted_covariance(const std::vector<double>& w, const std::vector<double>& a,
                             const std::vector<double>& b) {
  double wt = 0.0, ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    wt += w[i];
    ma += w[i] * a[i];
    mb += w[i] * b[i];
  }
  ma /= wt;
  mb /= wt;
  std::vector<double> u(w.size());
  double cov = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    u[i] = (a[i] - ma) * (b[i] - mb);
    cov += w[i] * u[i];
  }
  cov /= wt;
  double var = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) var += (w[i] / wt) * (w[i] / wt) * (u[i] - cov) * (u[i] - cov);
  return {cov, std::sqrt(var)};
}

}  // namespace

RationalSelfMap::RationalSelfMap(const ExactMap& map)
    : exact_(checked(map)), float_(to_float(exact_)), k_(exact_.nvars() - 1) {
  scale_ = 0.0;
  for (const auto& p : float_.components()) scale_ = std::max(scale_, p.coeff_norm());
  if (k_ == 1)
    for (const auto& p : float_.components()) dense_.push_back(binary_form_coefficients(p));
}

RationalSelfMap RationalSelfMap::identity(std::size_t k) {
  std::vector<ExactPoly> c;
  for (std::size_t i = 0; i <= k; ++i) c.push_back(ExactPoly::variable(k + 1, i));
  RationalSelfMap f{ExactMap(std::move(c), true)};
  f.identity_ = true;
  return f;
}

ProjectivePoint RationalSelfMap::apply(const ProjectivePoint& x) const {
  if (identity_) return x;
  return float_.apply(x);
}

double RationalSelfMap::image_size(const ProjectivePoint& x) const {
  return euclidean_norm(float_.evaluate(x.coords())) / scale_;
}

Correspondence::Correspondence(RationalSelfMap g, RationalSelfMap h) : g_(std::move(g)), h_(std::move(h)) {
  if (g_.k() != h_.k()) throw DimensionError("g and h act on different projective spaces");
}

Correspondence::Correspondence(RationalSelfMap f) : g_(std::move(f)), h_(RationalSelfMap::identity(g_.k())) {}

std::vector<Root> preimages(const Correspondence& f, const ProjectivePoint& y, Rng& rng) {
  if (y.dim() != f.k()) throw DimensionError("target lives on the wrong projective space");
  const ProjectivePoint target = f.h().apply(y);
  return f.k() == 1 ? fiber_p1(f.g(), target) : fiber_p2(f.g(), target, rng);
}

std::vector<Root> preimages(const Correspondence& f, const ProjectivePoint& y, int expected, Rng& rng) {
  auto roots = preimages(f, y, rng);
  if (total_multiplicity(roots) != expected)
    throw ExceptionalPointError("fiber has " + std::to_string(total_multiplicity(roots)) + " points, expected " +
                                std::to_string(expected));
  return roots;
}

int topological_degree(const Correspondence& f, Rng& rng, std::size_t trials) {
  std::vector<int> counts;
  for (std::size_t t = 0; t < trials; ++t) {
    const ProjectivePoint y = sample_point_fs(f.k(), rng);
    try {
      const auto roots = preimages(f, y, rng);
      bool deficient = roots.empty();
      for (const Root& r : roots)
        if (r.multiplicity > 1 || f.g().image_size(r.point) < 1e-4) deficient = true;
      if (!deficient) counts.push_back(total_multiplicity(roots));
    } catch (const ConditioningError&) {
    } catch (const IndeterminacyError&) {
    }
  }
  if (counts.empty()) throw ExceptionalPointError("every random target was deficient");
  for (int c : counts)
    if (c != counts.front())
      throw InconsistentDegreeError("preimage counts disagree on generic targets: " + std::to_string(c) + " vs " +
                                    std::to_string(counts.front()));
  return counts.front();
}

BackwardSample backward_orbit_sample(const std::vector<Correspondence>& schedule, const ProjectivePoint& x0,
                                     std::size_t depth, std::size_t n_samples, const Rng& rng,
                                     std::size_t workers) {
  if (schedule.empty()) throw ContractError("backward iteration needs at least one map");
  if (schedule.size() != 1 && schedule.size() < depth)
    throw ContractError("schedule must be a single map or cover every depth step");
  if (n_samples == 0) throw ContractError("need at least one backward path");
  for (const auto& f : schedule)
    if (f.k() != x0.dim()) throw DimensionError("starting point lives on the wrong projective space");
  std::vector<int> degrees;
  for (std::size_t i = 0; i < schedule.size(); ++i) degrees.push_back(expected_degree(schedule[i], rng.split(i)));

  std::vector<std::optional<ProjectivePoint>> ends(n_samples);
  std::vector<std::size_t> aborts(n_samples, 0);
  const std::size_t cap = n_samples / 100;
  std::atomic<std::size_t> total_aborts{0};
  parallel_for(n_samples, workers, [&](std::size_t s) {
    Rng r = rng.split(s);
    for (std::size_t attempt = 0; attempt < kMaxPathAttempts; ++attempt) {
      try {
        ProjectivePoint x = x0;
        for (std::size_t j = 0; j < depth; ++j) {
          const std::size_t m = schedule.size() == 1 ? 0 : depth - 1 - j;
          x = pick(preimages(schedule[m], x, degrees[m], r), r).point;
        }
        ends[s] = std::move(x);
        return;
      } catch (const ExceptionalPointError&) {
      } catch (const IndeterminacyError&) {
      } catch (const ConditioningError&) {
      }
      ++aborts[s];
      if (total_aborts.fetch_add(1) + 1 > cap) break;
    }
    throw ExceptionalPointError("more than 1% of backward paths hit exceptional points");
  });
  BackwardSample out;
  const double w = 1.0 / static_cast<double>(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    out.measure.add(*ends[s], w);
    out.aborted += aborts[s];
  }
  if (out.aborted > cap) throw ExceptionalPointError("more than 1% of backward paths hit exceptional points");
  return out;
}

DefectResult invariance_defect(const Correspondence& f, const EmpiricalMeasure& mu,
                               const std::vector<TestFunction>& psis, const Rng& rng, std::size_t workers) {
  const int d = expected_degree(f, rng);
  const auto& atoms = mu.atoms();
  std::vector<std::vector<double>> vals(atoms.size());
  parallel_for(atoms.size(), workers, [&](std::size_t i) {
    Rng r = rng.split(i);
    try {
      const auto roots = preimages(f, atoms[i].point, d, r);
      std::vector<double> v(psis.size());
      for (std::size_t p = 0; p < psis.size(); ++p) {
        double s = 0.0;
        for (const Root& x : roots) s += x.multiplicity * psis[p](x.point);
        v[p] = s / d - psis[p](atoms[i].point);
      }
      vals[i] = std::move(v);
    } catch (const ExceptionalPointError&) {
    } catch (const IndeterminacyError&) {
    } catch (const ConditioningError&) {
    }
  });
  DefectResult out;
  out.per_psi.assign(psis.size(), 0.0);
  double kept = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (vals[i].empty()) {
      ++out.skipped;
      continue;
    }
    kept += atoms[i].weight;
    for (std::size_t p = 0; p < psis.size(); ++p) out.per_psi[p] += atoms[i].weight * vals[i][p];
  }
  if (kept <= 0.0) throw ExceptionalPointError("every atom has an exceptional fiber");
  for (double& v : out.per_psi) {
    v /= kept;
    out.defect = std::max(out.defect, std::abs(v));
  }
  return out;
}

DefectResult coupled_invariance_defect(const Correspondence& f, const ProjectivePoint& x0, std::size_t depth,
                                       std::size_t n_samples, const std::vector<TestFunction>& psis,
                                       const Rng& rng, std::size_t workers) {
  if (n_samples == 0) throw ContractError("need at least one coupled path");
  const int d = expected_degree(f, rng);
  std::vector<std::vector<double>> diffs(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t s) {
    Rng r = rng.split(s);
    try {
      ProjectivePoint a = x0;
      ProjectivePoint b = pick(preimages(f, x0, d, r), r).point;
      for (std::size_t j = 0; j < depth; ++j) {
        const auto fa = expand(preimages(f, a, d, r));
        const auto fb = expand(preimages(f, b, d, r));
        const auto match = nearest_matching(fa, fb);
        const std::size_t i = r.below(fa.size());
        a = fa[i];
        b = fb[match[i]];
      }
      std::vector<double> v(psis.size());
      for (std::size_t p = 0; p < psis.size(); ++p) v[p] = psis[p](b) - psis[p](a);
      diffs[s] = std::move(v);
    } catch (const ExceptionalPointError&) {
    } catch (const IndeterminacyError&) {
    } catch (const ConditioningError&) {
    }
  });
  DefectResult out;
  out.per_psi.assign(psis.size(), 0.0);
  std::size_t kept = 0;
  for (const auto& v : diffs) {
    if (v.empty()) {
      ++out.skipped;
      continue;
    }
    ++kept;
    for (std::size_t p = 0; p < psis.size(); ++p) out.per_psi[p] += v[p];
  }
  if (kept == 0) throw ExceptionalPointError("every coupled path hit an exceptional point");
  for (double& v : out.per_psi) {
    v /= static_cast<double>(kept);
    out.defect = std::max(out.defect, std::abs(v));
  }
  return out;
}

MixingResult mixing_correlations(const RationalSelfMap& f, const EmpiricalMeasure& mu, const TestFunction& phi,
                                 const TestFunction& psi, std::size_t n_max) {
  MixingResult out;
  std::vector<double> w, a;
  std::vector<std::vector<double>> b(n_max + 1);
  for (const Atom& atom : mu.atoms()) {
    std::vector<double> row;
    row.reserve(n_max + 1);
    try {
      ProjectivePoint x = atom.point;
      row.push_back(psi(x));
      for (std::size_t n = 1; n <= n_max; ++n) {
        x = f.apply(x);
        row.push_back(psi(x));
      }
    } catch (const IndeterminacyError&) {
      ++out.dropped;
      continue;
    }
    w.push_back(atom.weight);
    a.push_back(phi(atom.point));
    for (std::size_t n = 0; n <= n_max; ++n) b[n].push_back(row[n]);
  }
  if (w.empty()) throw IndeterminacyError("every forward orbit hit the indeterminacy locus");
  for (std::size_t n = 0; n <= n_max; ++n) out.correlations.push_back(weighted_covariance(w, a, b[n]));
  return out;
}

MixingResult transfer_correlations(const RationalSelfMap& f, const EmpiricalMeasure& mu, const TestFunction& phi,
                                   const TestFunction& psi, std::size_t n_max, std::size_t workers) {
  if (f.k() != 1) throw DimensionError("transfer correlations are computed on P^1");
  if (n_max > 14) throw CostGuardError("transfer correlations enumerate d^n preimages; n_max is capped at 14");
  const Correspondence c(f);
  const int d = f.algebraic_degree();
  const auto& atoms = mu.atoms();
  std::vector<std::vector<double>> lphi(atoms.size());
  parallel_for(atoms.size(), workers, [&](std::size_t i) {
    Rng unused(0);
    std::vector<Root> level{{atoms[i].point, 1}};
    std::vector<double> row;
    row.reserve(n_max + 1);
    double norm = 1.0;
    for (std::size_t n = 0;; ++n) {
      double s = 0.0;
      for (const Root& x : level) s += x.multiplicity * phi(x.point);
      row.push_back(s / norm);
      if (n == n_max) break;
      std::vector<Root> next;
      next.reserve(level.size() * static_cast<std::size_t>(d));
      for (const Root& x : level)
        for (Root& r : preimages(c, x.point, d, unused)) next.push_back({std::move(r.point), r.multiplicity * x.multiplicity});
      level = std::move(next);
      norm *= d;
    }
    lphi[i] = std::move(row);
  });
  MixingResult out;
  std::vector<double> w, b;
  for (const Atom& atom : atoms) {
    w.push_back(atom.weight);
    b.push_back(psi(atom.point));
  }
  for (std::size_t n = 0; n <= n_max; ++n) {
    std::vector<double> a(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) a[i] = lphi[i][n];
    out.correlations.push_back(weighted_covariance(w, a, b));
  }
  return out;
}

std::optional<LinearFit> decay_fit(const MixingResult& m, std::size_t first, std::size_t last) {
  std::vector<double> xs, ys;
  for (std::size_t n = first; n <= last && n < m.correlations.size(); ++n) {
    const double v = std::abs(m.correlations[n].value);
    if (v == 0.0) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 2) return std::nullopt;
  return least_squares(xs, ys);
}

DegreeGrowth degree_growth(const RationalSelfMap& f, std::size_t n_max, Rng& rng, std::size_t max_terms) {
  if (n_max > kMaxDegreeGrowthSteps)
    throw CostGuardError("degree growth is limited to " + std::to_string(kMaxDegreeGrowthSteps) + " iterates");
  DegreeGrowth out;
  ExactMap g = f.exact();
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n > 1) g = compose_and_reduce(f.exact(), g);
    std::size_t terms = 0;
    for (const auto& p : g.components()) terms += p.size();
    if (terms > max_terms) throw CostGuardError("iterate " + std::to_string(n) + " has " + std::to_string(terms) + " terms");
    out.degrees.push_back(g.degree());
    out.roots.push_back(std::pow(static_cast<double>(g.degree()), 1.0 / static_cast<double>(n)));
  }
  out.topological_degree = f.k() == 1 ? f.algebraic_degree() : topological_degree(Correspondence(f), rng);
  // On P^1 the relevant lower degree is d_0 = 1.
  const double lower = f.k() == 1 ? 1.0 : (out.roots.empty() ? 0.0 : out.roots.back());
  out.d1_below_dt = lower < out.topological_degree;
  return out;
}

}  // namespace eqlab
