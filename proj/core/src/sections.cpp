#include "eqlab/sections.hpp"

#include <algorithm>
#include <cmath>

#include "eqlab/elimination.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/roots.hpp"

namespace eqlab {

std::string to_string(Field f) { return f == Field::Complex ? "complex" : "real"; }

Field field_from_string(const std::string& s) {
  if (s == "complex") return Field::Complex;
  if (s == "real") return Field::Real;
  throw ContractError("field must be \"complex\" or \"real\", got \"" + s + "\"");
}

void SectionEnsemble::validate() const {
  if (k < 1 || k > 2) throw DimensionError("section ensembles live on P^1 or P^2");
  if (n < 1) throw DimensionError("section degree must be at least 1");
  if (l < 1 || l > k) throw DimensionError("need 1 <= l <= k sections");
}

double kostlan_weight(const Monomial& alpha, std::size_t nvars) {
  int n = 0;
  double lg = 0.0;
  for (std::size_t i = 0; i < nvars; ++i) {
    n += alpha[i];
    lg -= std::lgamma(alpha[i] + 1.0);
  }
  lg += std::lgamma(n + 1.0);
  return std::exp(0.5 * lg);
}

FloatPoly sample_kostlan_form(std::size_t k, int n, Field field, Rng& rng) {
  if (k < 1) throw DimensionError("k must be at least 1");
  if (n < 1) throw DimensionError("section degree must be at least 1");
  const std::size_t nvars = k + 1;
  FloatPoly p(nvars, n);
  for (const Monomial& m : monomials(nvars, n)) {
    const Complex g = field == Field::Complex ? rng.complex_normal() : Complex(rng.normal(), 0.0);
    p.add_term_unchecked(m, kostlan_weight(m, nvars) * g);
  }
  return p;
}

std::vector<FloatPoly> sample_section(const SectionEnsemble& ens, Rng& rng) {
  ens.validate();
  std::vector<FloatPoly> out;
  for (std::size_t s = 0; s < ens.l; ++s) out.push_back(sample_kostlan_form(ens.k, ens.n, ens.field, rng));
  return out;
}

ZeroSet ZeroSet::from_points(EmpiricalMeasure points, std::size_t k, int n, std::size_t l) {
  ZeroSet z(ZeroMethod::Direct, k, n, l);
  z.points_ = std::move(points);
  return z;
}

ZeroSet ZeroSet::from_curve(FloatPoly section) {
  if (section.nvars() != 3) throw DimensionError("curves are sections on P^2");
  ZeroSet z(ZeroMethod::Crofton, 2, section.degree(), 1);
  z.curve_ = std::move(section);
  return z;
}

const EmpiricalMeasure& ZeroSet::points() const {
  if (method_ != ZeroMethod::Direct) throw ContractError("a curve in P^2 has no point list; pair it by Crofton slicing");
  return points_;
}

const FloatPoly& ZeroSet::curve() const {
  if (method_ != ZeroMethod::Crofton) throw ContractError("zero set is a point set, not a curve");
  return *curve_;
}

namespace {

EmpiricalMeasure measure_from_roots(const std::vector<Root>& roots) {
  EmpiricalMeasure mu;
  for (const Root& r : roots) mu.add(r.point, static_cast<double>(r.multiplicity));
  return mu;
}

}  // namespace

ZeroSet zero_set(const std::vector<FloatPoly>& sections, std::size_t k, Rng& rng) {
  if (sections.empty() || sections.size() > k) throw DimensionError("need 1 <= l <= k sections");
  for (const FloatPoly& s : sections)
    if (s.nvars() != k + 1) throw DimensionError("section lives on the wrong projective space");
  if (k == 1) {
    const FloatPoly& s = sections.front();
    return ZeroSet::from_points(measure_from_roots(univariate_roots(s)), 1, s.degree(), 1);
  }
  if (k == 2 && sections.size() == 1) return ZeroSet::from_curve(sections.front());
  if (k == 2 && sections.size() == 2) {
    const auto roots = bivariate_common_zeros(sections[0], sections[1], rng);
    if (sections[0].degree() != sections[1].degree())
      throw InconsistentDegreeError("paired sections must share a degree");
    return ZeroSet::from_points(measure_from_roots(roots), 2, sections[0].degree(), 2);
  }
  throw DimensionError("zero sets are extracted on P^1 and P^2 only");
}

Estimate pair_zero_current(const ZeroSet& zs, const TestFunction& psi, Rng& rng, std::size_t m_lines) {
  if (psi.dim() != zs.dim()) throw DimensionError("test function lives on a different projective space");
  if (zs.method() == ZeroMethod::Direct) return {zs.points().pair(psi), 0.0};

  if (m_lines == 0) throw ContractError("Crofton pairing needs at least one line");
  const FloatPoly& s = zs.curve();
  const std::size_t max_degenerate = m_lines / 100;
  std::size_t degenerate = 0;
  RunningStats acc;
  std::vector<Complex> z(3);
  while (acc.count() < m_lines) {
    const ProjectivePoint a = sample_point_fs(2, rng);
    const ProjectivePoint b = sample_point_fs(2, rng);
    const LineRestriction r = restrict_to_line(s, a, b);
    if (r.vanishes) {
      if (++degenerate > max_degenerate)
        throw DegenerateLineError("more than 1% of Crofton lines lie inside the curve");
      continue;
    }
    double v = 0.0;
    for (const Root& root : univariate_roots(r.poly)) {
      const Complex u = root.point[0], t = root.point[1];
      for (std::size_t i = 0; i < 3; ++i) z[i] = u * a[i] + t * b[i];
      v += root.multiplicity * psi(z);
    }
    acc.add(v);
  }
  return acc.estimate();
}

double discrepancy(const ZeroSet& zs, const TestFunction& psi, Rng& rng, std::size_t m_lines) {
  const auto base = psi.fs_integral();
  if (!base) throw ContractError("test function " + psi.id() + " has no closed-form integral");
  const double scale = std::pow(static_cast<double>(zs.degree()), static_cast<double>(zs.codim()));
  return pair_zero_current(zs, psi, rng, m_lines).value / scale - *base;
}

double discrepancy(const std::vector<FloatPoly>& sections, std::size_t k, const TestFunction& psi, Rng& rng,
                   std::size_t m_lines) {
  return discrepancy(zero_set(sections, k, rng), psi, rng, m_lines);
}

DiscrepancySamples discrepancy_samples(const SectionEnsemble& ens, const std::vector<TestFunction>& psis,
                                       std::size_t trials, const Rng& rng, std::size_t workers,
                                       std::size_t m_lines) {
  ens.validate();
  DiscrepancySamples out;
  out.ensemble = ens;
  for (const auto& p : psis) {
    if (p.dim() != ens.k) throw DimensionError("test function " + p.id() + " lives on the wrong space");
    out.psi_ids.push_back(p.id());
  }
  out.d.assign(psis.size(), std::vector<double>(trials));
  parallel_for(trials, workers, [&](std::size_t t) {
    Rng r = rng.split(t);
    const auto sections = sample_section(ens, r);
    const ZeroSet zs = zero_set(sections, ens.k, r);
    for (std::size_t p = 0; p < psis.size(); ++p) {
      Rng lines = r.split(p);
      out.d[p][t] = discrepancy(zs, psis[p], lines, m_lines);
    }
  });
  return out;
}

SpreadRow spread_row(int n, const std::vector<double>& d) {
  std::vector<double> a(d.size());
  std::transform(d.begin(), d.end(), a.begin(), [](double x) { return std::abs(x); });
  return {n, median(a), mean_estimate(d)};
}

ConcentrationReport concentration_table(const std::vector<int>& n_grid,
                                        const std::vector<std::vector<double>>& d_per_n, double epsilon) {
  if (n_grid.size() != d_per_n.size()) throw DimensionError("one sample column per degree");
  ConcentrationReport rep;
  rep.epsilon = epsilon;
  bool all_nonzero = true;
  std::vector<double> xs, ys, yb;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    ConcentrationRow row;
    row.n = n_grid[i];
    row.trials = d_per_n[i].size();
    row.exceed = static_cast<std::size_t>(
        std::count_if(d_per_n[i].begin(), d_per_n[i].end(), [&](double d) { return std::abs(d) >= epsilon; }));
    row.wilson = wilson_interval(row.exceed, row.trials);
    row.upper_bound = row.exceed == 0;
    row.probability = row.upper_bound ? row.wilson.hi
                                      : static_cast<double>(row.exceed) / static_cast<double>(row.trials);
    all_nonzero = all_nonzero && !row.upper_bound;
    xs.push_back(row.n);
    ys.push_back(row.upper_bound ? 0.0 : std::log(row.probability));
    yb.push_back(std::log(row.probability));
    rep.rows.push_back(row);
  }
  if (xs.size() >= 2) {
    if (all_nonzero) rep.fit = least_squares(xs, ys);
    rep.bound_fit = least_squares(xs, yb);
  }
  return rep;
}

ConcentrationReport concentration_experiment(SectionEnsemble ens, const TestFunction& psi, double epsilon,
                                             const std::vector<int>& n_grid, std::size_t trials,
                                             const Rng& rng, std::size_t workers) {
  if (trials < 100) throw ContractError("concentration experiments need at least 100 trials per degree");
  std::vector<std::vector<double>> cols;
  for (int n : n_grid) {
    ens.n = n;
    cols.push_back(discrepancy_samples(ens, {psi}, trials, rng.split(static_cast<std::uint64_t>(n)), workers).d[0]);
  }
  return concentration_table(n_grid, cols, epsilon);
}

VolumeCount volume_count(const SectionEnsemble& ens, const ChordalBall& region, std::size_t trials,
                         const Rng& rng, std::size_t workers, std::size_t mc_samples) {
  ens.validate();
  if (ens.l != ens.k) throw DimensionError("volume counts need point zero sets (l = k)");
  if (region.center.dim() != ens.k) throw DimensionError("region lives on the wrong projective space");
  std::vector<double> counts(trials);
  const double scale = std::pow(static_cast<double>(ens.n), static_cast<double>(ens.l));
  parallel_for(trials, workers, [&](std::size_t t) {
    Rng r = rng.split(t);
    const ZeroSet zs = zero_set(sample_section(ens, r), ens.k, r);
    counts[t] = zs.points().integrate([&](const ProjectivePoint& p) { return region.contains(p) ? 1.0 : 0.0; }) / scale;
  });
  VolumeCount out;
  out.mean = mean_estimate(counts);
  out.baseline = region.volume();
  Rng mc = rng.split(~std::uint64_t{0});
  std::size_t inside = 0;
  for (std::size_t i = 0; i < mc_samples; ++i) inside += region.contains(sample_point_fs(ens.k, mc)) ? 1 : 0;
  const double p = mc_samples ? static_cast<double>(inside) / static_cast<double>(mc_samples) : 0.0;
  out.mc_volume = {p, mc_samples ? std::sqrt(p * (1 - p) / static_cast<double>(mc_samples)) : 0.0};
  return out;
}

}  // namespace eqlab
