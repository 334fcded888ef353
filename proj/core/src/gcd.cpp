#include "eqlab/gcd.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace eqlab {

namespace {

using Dense = std::vector<GaussianRational>;

void trim(Dense& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

/// Euclid over Q(i) on dense coefficient vectors (index = power).
Dense univariate_gcd(Dense a, Dense b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    while (a.size() >= b.size() && !a.empty()) {
      const GaussianRational q = a.back() / b.back();
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= q * b[i];
      a.pop_back();
      trim(a);
    }
    std::swap(a, b);
  }
  return a;
}

/// Degree of gcd of two binary forms.
int binary_form_gcd_degree(const ExactPoly& a, const ExactPoly& b) {
  auto split = [](const ExactPoly& p, int& t_order) {
    Dense d(static_cast<std::size_t>(p.degree()) + 1);
    t_order = p.degree();
    for (const auto& [m, c] : p.terms()) {
      d[m[0]] = c;
      t_order = std::min<int>(t_order, m[1]);
    }
    return d;
  };
  int ta = 0, tb = 0;
  const Dense da = split(a, ta), db = split(b, tb);
  const Dense g = univariate_gcd(da, db);
  return std::min(ta, tb) + static_cast<int>(g.size()) - 1;
}

/// Restriction to the line through two integer points, or nullopt if either
/// restriction vanishes.
std::optional<int> gcd_degree_on_line(const ExactPoly& a, const ExactPoly& b, std::uint64_t salt) {
  const std::size_t n = a.nvars();
  std::vector<ExactPoly> line;
  std::uint64_t state = 0x2545f4914f6cdd1dULL ^ salt;
  for (std::size_t v = 0; v < n; ++v) {
    ExactPoly lin(2, 1);
    for (std::size_t s = 0; s < 2; ++s) {
      state = splitmix64(state);
      const long coeff = static_cast<long>(state % 61) - 30;
      Monomial m{};
      m[s] = 1;
      lin.add_term(m, GaussianRational(coeff));
    }
    line.push_back(lin);
  }
  const ExactPoly ra = substitute(a, line), rb = substitute(b, line);
  if (ra.is_zero() || rb.is_zero()) return std::nullopt;
  return binary_form_gcd_degree(ra, rb);
}

ExactPoly one(std::size_t nvars) { return ExactPoly::constant(nvars, GaussianRational(1)); }

ExactPoly normalized(ExactPoly p) {
  if (p.is_zero()) return p;
  const GaussianRational lead = p.terms().begin()->second;
  return p * (GaussianRational(1) / lead);
}

int degree_in(const ExactPoly& p, std::size_t var) {
  int d = 0;
  for (const auto& [m, c] : p.terms()) d = std::max<int>(d, m[var]);
  return d;
}

/// Coefficients of p as a polynomial in x_var.
std::map<int, ExactPoly> coefficients_in(const ExactPoly& p, std::size_t var) {
  std::map<int, ExactPoly> out;
  for (const auto& [m, c] : p.terms()) {
    const int j = m[var];
    Monomial rest = m;
    rest[var] = 0;
    auto it = out.try_emplace(j, p.nvars(), p.degree() - j).first;
    it->second.add_term_unchecked(rest, c);
  }
  return out;
}

ExactPoly times_power(const ExactPoly& p, std::size_t var, int e) {
  Monomial m{};
  m[var] = static_cast<std::uint16_t>(e);
  return p * ExactPoly::term(p.nvars(), m, GaussianRational(1));
}

ExactPoly gcd_rec(const ExactPoly& a, const ExactPoly& b, std::size_t level);

ExactPoly content(const ExactPoly& p, std::size_t level) {
  ExactPoly g(p.nvars(), 0);
  for (const auto& [j, c] : coefficients_in(p, level)) {
    g = gcd_rec(g, c, level + 1);
    if (g.degree() == 0) break;
  }
  return g;
}

ExactPoly primitive_part(const ExactPoly& p, std::size_t level) {
  return normalized(exact_divide(p, content(p, level)));
}

ExactPoly gcd_rec(const ExactPoly& a, const ExactPoly& b, std::size_t level) {
  if (a.is_zero()) return normalized(b);
  if (b.is_zero()) return normalized(a);
  if (a.degree() == 0 || b.degree() == 0) return one(a.nvars());
  const std::size_t n = a.nvars();
  if (level + 1 >= n) {
    Monomial m{};
    m[n - 1] = static_cast<std::uint16_t>(std::min(a.degree(), b.degree()));
    return ExactPoly::term(n, m, GaussianRational(1));
  }
  const ExactPoly ca = content(a, level), cb = content(b, level);
  const ExactPoly c = gcd_rec(ca, cb, level + 1);
  ExactPoly p = normalized(exact_divide(a, ca));
  ExactPoly q = normalized(exact_divide(b, cb));
  if (degree_in(p, level) < degree_in(q, level)) std::swap(p, q);
  ExactPoly g = one(n);
  for (;;) {
    const int dq = degree_in(q, level);
    if (dq == 0) break;
    ExactPoly r = p;
    const ExactPoly lq = coefficients_in(q, level).rbegin()->second;
    while (!r.is_zero() && degree_in(r, level) >= dq) {
      const auto rc = coefficients_in(r, level);
      const int dr = rc.rbegin()->first;
      r = lq * r - times_power(rc.rbegin()->second * q, level, dr - dq);
    }
    if (r.is_zero()) {
      g = q;
      break;
    }
    if (degree_in(r, level) == 0) break;
    p = std::move(q);
    q = primitive_part(r, level);
  }
  return normalized(c * g);
}

}  // namespace

std::optional<ExactPoly> try_divide(const ExactPoly& a, const ExactPoly& b) {
  if (a.nvars() != b.nvars()) throw DimensionError("division of polynomials in different rings");
  if (b.is_zero()) throw ZeroPolynomialError("division by the zero polynomial");
  if (a.is_zero()) return ExactPoly(a.nvars(), std::max(0, a.degree() - b.degree()));
  if (a.degree() < b.degree()) return std::nullopt;
  const auto& [lead_m, lead_c] = *b.terms().begin();
  const GaussianRational inv = GaussianRational(1) / lead_c;
  ExactPoly quotient(a.nvars(), a.degree() - b.degree());
  ExactPoly r = a;
  while (!r.is_zero()) {
    const auto& [rm, rc] = *r.terms().begin();
    if (!monomial_divides(lead_m, rm)) return std::nullopt;
    Monomial qm{};
    for (std::size_t i = 0; i < kMaxVars; ++i) qm[i] = static_cast<std::uint16_t>(rm[i] - lead_m[i]);
    const GaussianRational qc = rc * inv;
    quotient.add_term_unchecked(qm, qc);
    for (const auto& [bm, bc] : b.terms()) r.add_term_unchecked(monomial_product(qm, bm), -(qc * bc));
  }
  return quotient;
}

ExactPoly exact_divide(const ExactPoly& a, const ExactPoly& b) {
  auto q = try_divide(a, b);
  if (!q) throw Error("polynomial division is not exact");
  return *std::move(q);
}

ExactPoly poly_gcd(const ExactPoly& a, const ExactPoly& b) {
  if (a.nvars() != b.nvars()) throw DimensionError("gcd of polynomials in different rings");
  if (a.is_zero() && b.is_zero()) return a;
  if (!a.is_zero() && !b.is_zero() && a.degree() > 0 && b.degree() > 0) {
    // Monomial content first, then a cheap coprimality test on a line.
    Monomial ma, mb;
    ma.fill(std::numeric_limits<std::uint16_t>::max());
    mb = ma;
    for (const auto& [m, c] : a.terms())
      for (std::size_t i = 0; i < kMaxVars; ++i) ma[i] = std::min(ma[i], m[i]);
    for (const auto& [m, c] : b.terms())
      for (std::size_t i = 0; i < kMaxVars; ++i) mb[i] = std::min(mb[i], m[i]);
    Monomial common{};
    for (std::size_t i = 0; i < kMaxVars; ++i) common[i] = std::min(ma[i], mb[i]);
    const ExactPoly mono = ExactPoly::term(a.nvars(), common, GaussianRational(1));
    const ExactPoly ra = exact_divide(a, ExactPoly::term(a.nvars(), ma, GaussianRational(1)));
    const ExactPoly rb = exact_divide(b, ExactPoly::term(b.nvars(), mb, GaussianRational(1)));
    if (ra.degree() == 0 || rb.degree() == 0) return mono;
    const auto line_degree = gcd_degree_on_line(ra, rb, static_cast<std::uint64_t>(ra.size() * 31 + rb.size()));
    if (line_degree && *line_degree == 0) return mono;
    return normalized(mono * gcd_rec(ra, rb, 0));
  }
  return gcd_rec(a, b, 0);
}

ExactPoly poly_gcd(const std::vector<ExactPoly>& polys) {
  if (polys.empty()) throw std::invalid_argument("gcd of an empty family");
  ExactPoly g(polys.front().nvars(), 0);
  for (const ExactPoly& p : polys) {
    if (p.is_zero()) continue;
    g = g.is_zero() ? normalized(p) : poly_gcd(g, p);
    if (g.degree() == 0) break;
  }
  return g;
}

ExactMap reduce_map(const ExactMap& f) {
  const ExactPoly g = poly_gcd(f.components());
  if (g.degree() == 0) return ExactMap(f.components(), true);
  std::vector<ExactPoly> out;
  for (const ExactPoly& p : f.components()) {
    out.push_back(p.is_zero() ? ExactPoly(p.nvars(), p.degree() - g.degree()) : exact_divide(p, g));
  }
  return ExactMap(std::move(out), true);
}

ExactMap compose_and_reduce(const ExactMap& f, const ExactMap& g) {
  return reduce_map(compose_raw(f, g));
}

}  // namespace eqlab
