#include "eqlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eqlab/errors.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/sections.hpp"

namespace eqlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kRefinementStarts = 4;
constexpr std::size_t kRefinementTrials = 8;
constexpr double kRefinementRadius = 0.25;
constexpr int kMaxMovesPerRound = 20;
constexpr std::size_t kAuditSupSamples = 2000;

std::optional<LinearFit> log_fit(const std::vector<double>& t, const std::vector<double>& p) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (p[i] > 0.0) {
      x.push_back(t[i]);
      y.push_back(std::log(p[i]));
    }
  if (x.size() < 2 || x.front() == x.back()) return std::nullopt;
  return least_squares(x, y);
}

void fill_fits(ExceedanceProfile& prof) {
  std::vector<double> t, p, upper;
  for (const auto& r : prof.rows) {
    t.push_back(r.t);
    p.push_back(r.probability);
    upper.push_back(r.count > 0 ? r.probability : r.wilson.hi);
  }
  std::vector<double> nonzero_t, nonzero_p;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (p[i] > 0.0) {
      nonzero_t.push_back(t[i]);
      nonzero_p.push_back(p[i]);
    }
  prof.fit = log_fit(nonzero_t, nonzero_p);
  prof.bound_fit = log_fit(t, upper);
}

}  // namespace

PointSampler fs_sampler(std::size_t k) {
  return [k](Rng& rng) { return sample_point_fs(k, rng); };
}

PointSampler real_fs_sampler(std::size_t k) {
  return [k](Rng& rng) { return sample_point_real(k, rng); };
}

PointSampler empirical_sampler(const EmpiricalMeasure& mu) {
  if (mu.empty()) throw ContractError("cannot sample an empty measure");
  std::vector<double> cumulative;
  double s = 0.0;
  for (const Atom& a : mu.atoms()) cumulative.push_back(s += a.weight);
  if (!(s > 0.0)) throw ContractError("cannot sample a measure of zero mass");
  return [atoms = mu.atoms(), cumulative = std::move(cumulative), s](Rng& rng) {
    const double u = rng.uniform() * s;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), atoms.size() - 1);
    return atoms[i].point;
  };
}

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::MaxZero: return "max_zero";
    case Normalization::MeanZero: return "mean_zero";
  }
  return "none";
}

QpshWitness::QpshWitness(FloatPoly poly, double s) : f(std::move(poly)), shift(s) {
  if (f.is_zero()) throw ZeroPolynomialError("a witness needs a nonzero form");
  if (f.degree() < 1) throw ContractError("a witness needs a form of degree >= 1");
}

double QpshWitness::raw(const ProjectivePoint& z) const {
  if (z.dim() != k()) throw DimensionError("witness evaluated at a point of the wrong dimension");
  const double a = std::abs(f.evaluate(z));
  return a == 0.0 ? kNegInf : std::log(a) / f.degree();
}

CompactSet whole_space(std::size_t k) {
  return {"P^" + std::to_string(k), [](const ProjectivePoint&) { return true; }, fs_sampler(k), false};
}

CompactSet real_points(std::size_t k) {
  return {"RP^" + std::to_string(k), [](const ProjectivePoint& p) { return p.is_real(1e-12); }, real_fs_sampler(k),
          true};
}

CompactSet coordinate_hyperplane(std::size_t k, std::size_t i) {
  if (i > k) throw DimensionError("coordinate index out of range");
  return {"{z" + std::to_string(i) + "=0}", [i](const ProjectivePoint& p) { return std::abs(p[i]) <= 1e-12; },
          [k, i](Rng& rng) {
            std::vector<Complex> z(k + 1);
            for (std::size_t j = 0; j <= k; ++j) z[j] = j == i ? Complex{} : rng.complex_normal();
            return ProjectivePoint(std::move(z));
          },
          false};
}

CompactSet chordal_ball_set(const ProjectivePoint& center, double radius) {
  if (!(radius > 0.0)) throw ContractError("ball radius must be positive");
  return {"ball", [center, radius](const ProjectivePoint& p) { return chordal_distance(center, p) < radius; },
          [center, radius](Rng& rng) {
            const double r = radius * std::pow(rng.uniform(), 1.0 / (2.0 * static_cast<double>(center.dim())));
            return perturb(center, r, rng);
          },
          false};
}

SupEstimate estimate_sup(const QpshWitness& w, const CompactSet& K, std::size_t n_samples, Rng& rng) {
  struct Candidate {
    double value;
    ProjectivePoint point;
  };
  std::vector<Candidate> pool;
  for (std::size_t i = 0; i < n_samples; ++i) {
    ProjectivePoint p = K.sample(rng);
    if (p.dim() != w.k()) throw DimensionError("K lives in a different projective space");
    if (!K.contains(p)) continue;
    const double v = w.raw(p);
    pool.push_back({v, std::move(p)});
  }
  if (w.argmax && K.contains(*w.argmax)) pool.push_back({w.raw(*w.argmax), *w.argmax});
  if (pool.empty()) throw ContractError("K produced no sample points");

  const std::size_t starts = std::min(kRefinementStarts, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(starts), pool.end(),
                    [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
  Candidate best = pool.front();
  if (best.value == kNegInf) return {kNegInf + w.shift, best.point};
  for (std::size_t s = 0; s < starts; ++s) {
    Candidate cur = pool[s];
    double radius = kRefinementRadius;
    // At each radius keep moving until a batch of trials brings no gain.
    for (int round = 0; round < kSupRefinementRounds; ++round, radius *= 0.5) {
      for (int moves = 0; moves < kMaxMovesPerRound; ++moves) {
        bool improved = false;
        for (std::size_t j = 0; j < kRefinementTrials; ++j) {
          ProjectivePoint q = perturb(cur.point, radius, rng, K.real);
          if (!K.contains(q)) continue;
          const double v = w.raw(q);
          if (v > cur.value) {
            cur = {v, std::move(q)};
            improved = true;
          }
        }
        if (!improved) break;
      }
    }
    if (cur.value > best.value) best = cur;
  }
  return {best.value + w.shift, best.point};
}

QpshWitness normalize_qpsh(const QpshWitness& w, Normalization mode, const PointSampler& mu, std::size_t n_samples,
                           Rng& rng) {
  QpshWitness out = w;
  out.shift = 0.0;
  out.normalization = mode;
  out.shift_std_error = 0.0;
  switch (mode) {
    case Normalization::None:
      break;
    case Normalization::MaxZero: {
      const SupEstimate s = estimate_sup(out, whole_space(w.k()), n_samples, rng);
      out.shift = 0.0 - s.sup;
      out.argmax = s.argmax;
      break;
    }
    case Normalization::MeanZero: {
      if (n_samples < kMinMeanSamples) throw ContractError("mean_zero normalization needs at least 10^4 samples");
      RunningStats st;
      for (std::size_t i = 0; i < n_samples; ++i) st.add(w.raw(mu(rng)));
      if (!std::isfinite(st.mean())) throw ConditioningError("a sample hit the zero set of the witness");
      out.shift = -st.mean();
      out.shift_std_error = st.std_error();
      break;
    }
  }
  return out;
}

R1Audit r1_bound_audit(std::size_t k, std::size_t n_witnesses, const std::vector<int>& degree_pool, const Rng& rng,
                       std::size_t workers) {
  if (k < 1) throw DimensionError("k must be at least 1");
  if (degree_pool.empty() || n_witnesses == 0) throw ContractError("audit needs witnesses and a degree pool");
  R1Audit audit;
  audit.k = k;
  audit.bound = 0.5 * (1.0 + std::log(static_cast<double>(k)));
  audit.threshold = audit.bound + 0.05;
  audit.sups.assign(n_witnesses, 0.0);
  parallel_for(n_witnesses, workers, [&](std::size_t i) {
    Rng r = rng.split(i);
    const int n = degree_pool[r.below(degree_pool.size())];
    const QpshWitness w(sample_kostlan_form(k, n, Field::Complex, r));
    const QpshWitness normalized = normalize_qpsh(w, Normalization::MeanZero, fs_sampler(k), kMinMeanSamples, r);
    audit.sups[i] = estimate_sup(normalized, whole_space(k), kAuditSupSamples, r).sup;
  });
  audit.max_sup = *std::max_element(audit.sups.begin(), audit.sups.end());
  audit.pass = audit.max_sup <= audit.threshold;
  return audit;
}

ModerateIntegral moderate_integral(const PointSampler& mu, const QpshWitness& w, double alpha, std::size_t n_samples,
                                   Rng& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractError("alpha must lie in (0, 1]");
  if (w.normalization != Normalization::MaxZero) throw ContractError("moderation integrals need a max_zero witness");
  if (n_samples < 2) throw ContractError("need at least two samples");
  std::vector<double> xs(n_samples);
  for (double& x : xs) x = std::exp(-alpha * w.value(mu(rng)));
  ModerateIntegral out;
  out.estimate = mean_estimate(xs);
  std::vector<double> sorted = xs;
  const std::size_t top = std::max<std::size_t>(1, n_samples / 1000);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(top), sorted.end(),
                   std::greater<>());
  const double top_sum = stable_sum(std::span<const double>(sorted.data(), top));
  out.heavy_tail = top_sum > 0.5 * stable_sum(sorted);
  return out;
}

ExceedanceProfile exceedance_profile(const PointSampler& mu, const QpshWitness& w, const std::vector<double>& t_grid,
                                     std::size_t n_samples, Rng& rng) {
  if (w.normalization != Normalization::MeanZero) throw ContractError("exceedance profiles need a mean_zero witness");
  if (t_grid.empty() || n_samples == 0) throw ContractError("need a t grid and samples");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (t_grid[i] < 0.0 || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
      throw ContractError("t grid must be increasing and nonnegative");
  std::vector<double> values(n_samples);
  for (double& v : values) v = w.value(mu(rng));
  ExceedanceProfile prof;
  for (double t : t_grid) {
    ExceedanceRow row;
    row.t = t;
    row.trials = n_samples;
    row.count = static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [t](double v) { return v < -t; }));
    row.probability = static_cast<double>(row.count) / static_cast<double>(n_samples);
    row.wilson = wilson_interval(row.count, n_samples);
    prof.rows.push_back(row);
  }
  fill_fits(prof);
  return prof;
}

ExceedanceProfile exceedance_envelope(const std::vector<ExceedanceProfile>& profiles) {
  if (profiles.empty()) throw ContractError("envelope of no profiles");
  ExceedanceProfile env;
  env.rows = profiles.front().rows;
  for (const auto& p : profiles) {
    if (p.rows.size() != env.rows.size()) throw ContractError("profiles on different grids");
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
      if (p.rows[i].t != env.rows[i].t) throw ContractError("profiles on different grids");
      if (p.rows[i].probability > env.rows[i].probability ||
          (p.rows[i].probability == env.rows[i].probability && p.rows[i].wilson.hi > env.rows[i].wilson.hi))
        env.rows[i] = p.rows[i];
    }
  }
  fill_fits(env);
  return env;
}

CapacityBound capacity_upper_bound(const CompactSet& K, const std::vector<QpshWitness>& witnesses,
                                   std::size_t n_samples, Rng& rng) {
  if (witnesses.empty()) throw ContractError("capacity needs at least one witness");
  CapacityBound out;
  for (const QpshWitness& w : witnesses) {
    if (w.normalization != Normalization::MaxZero) throw ContractError("capacity needs max_zero witnesses");
    const double s = estimate_sup(w, K, n_samples, rng).sup;
    out.sups.push_back(s);
    out.bound = std::min(out.bound, std::clamp(std::exp(s), 0.0, 1.0));
  }
  return out;
}

PotentialValue chordal_potential_eval(const EmpiricalMeasure& nu, const ProjectivePoint& x) {
  if (x.dim() != 1) throw DimensionError("chordal potentials live on P^1");
  PotentialValue out;
  double s = 0.0;
  for (const Atom& a : nu.atoms()) {
    if (a.point.dim() != 1) throw DimensionError("chordal potentials live on P^1");
    const double d = chordal_distance(x, a.point);
    if (d < kPointTolerance) {
      if (a.weight > 0.0) out.atom_hit = true;
      continue;
    }
    s += a.weight * std::log(d);
  }
  out.value = out.atom_hit ? kNegInf : s;
  return out;
}

}  // namespace eqlab
