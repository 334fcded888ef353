#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "eqlab/errors.hpp"
#include "eqlab/gaussian_rational.hpp"
#include "eqlab/projective.hpp"

namespace eqlab {

inline constexpr std::size_t kMaxVars = 8;

using Monomial = std::array<std::uint16_t, kMaxVars>;

inline int monomial_degree(const Monomial& m) {
  int d = 0;
  for (auto e : m) d += e;
  return d;
}

inline Monomial monomial_product(const Monomial& a, const Monomial& b) {
  Monomial c{};
  for (std::size_t i = 0; i < kMaxVars; ++i) c[i] = static_cast<std::uint16_t>(a[i] + b[i]);
  return c;
}

/// a divides b
inline bool monomial_divides(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (a[i] > b[i]) return false;
  return true;
}

/// Every exponent vector of total degree `degree` in `nvars` variables.
inline std::vector<Monomial> monomials(std::size_t nvars, int degree) {
  std::vector<Monomial> out;
  Monomial m{};
  auto rec = [&](auto&& self, std::size_t v, int left) -> void {
    if (v + 1 == nvars) {
      m[v] = static_cast<std::uint16_t>(left);
      out.push_back(m);
      return;
    }
    for (int e = left; e >= 0; --e) {
      m[v] = static_cast<std::uint16_t>(e);
      self(self, v + 1, left - e);
    }
  };
  rec(rec, 0, degree);
  return out;
}

/// Graded reverse-lexicographic order, largest first (x0 > x1 > ... ).
struct RevlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = monomial_degree(a), db = monomial_degree(b);
    if (da != db) return da > db;
    for (std::size_t i = kMaxVars; i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
};

template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<GaussianRational> {
  static constexpr bool exact = true;
  static bool is_zero(const GaussianRational& c) { return c.is_zero(); }
  static Complex to_complex(const GaussianRational& c) { return c.to_complex(); }
  static std::string text(const GaussianRational& c) { return c.to_string(); }
};

template <>
struct CoeffTraits<Complex> {
  static constexpr bool exact = false;
  static bool is_zero(const Complex& c) { return c == Complex{}; }
  static Complex to_complex(const Complex& c) { return c; }
  static std::string text(const Complex& c) {
    char buf[96];
    if (c.imag() == 0.0) {
      std::snprintf(buf, sizeof buf, "%.17g", c.real());
    } else {
      std::snprintf(buf, sizeof buf, "(%.17g + %.17g*i)", c.real(), c.imag());
    }
    return buf;
  }
};

/// Homogeneous polynomial in `nvars` variables with coefficients in C.
/// Zero coefficients are never stored.
template <class C>
class HomogeneousPoly {
 public:
  using Coeff = C;
  using Terms = std::map<Monomial, C, RevlexGreater>;

  HomogeneousPoly(std::size_t nvars, int degree) : nvars_(nvars), degree_(degree) {
    if (nvars < 2 || nvars > kMaxVars)
      throw DimensionError("polynomials need between 2 and " + std::to_string(kMaxVars) + " variables");
    if (degree < 0) throw DimensionError("polynomial degree must be nonnegative");
  }

  static HomogeneousPoly variable(std::size_t nvars, std::size_t i) {
    HomogeneousPoly p(nvars, 1);
    Monomial m{};
    m.at(i) = 1;
    p.add_term(m, C(1));
    return p;
  }

  static HomogeneousPoly constant(std::size_t nvars, const C& c) {
    HomogeneousPoly p(nvars, 0);
    p.add_term(Monomial{}, c);
    return p;
  }

  static HomogeneousPoly term(std::size_t nvars, const Monomial& m, const C& c) {
    HomogeneousPoly p(nvars, monomial_degree(m));
    p.add_term(m, c);
    return p;
  }

  std::size_t nvars() const noexcept { return nvars_; }
  int degree() const noexcept { return degree_; }
  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  C coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? C(0) : it->second;
  }

  void add_term(const Monomial& m, const C& c) {
    if (monomial_degree(m) != degree_) throw InhomogeneousError(degree_, monomial_degree(m));
    for (std::size_t i = nvars_; i < kMaxVars; ++i)
      if (m[i] != 0) throw DimensionError("monomial uses a variable beyond nvars");
    if (CoeffTraits<C>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (CoeffTraits<C>::is_zero(it->second)) terms_.erase(it);
    }
  }

  HomogeneousPoly& operator+=(const HomogeneousPoly& o) { return accumulate(o, false); }
  HomogeneousPoly& operator-=(const HomogeneousPoly& o) { return accumulate(o, true); }

  HomogeneousPoly& operator*=(const C& s) {
    if (CoeffTraits<C>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend HomogeneousPoly operator+(HomogeneousPoly a, const HomogeneousPoly& b) { return a += b; }
  friend HomogeneousPoly operator-(HomogeneousPoly a, const HomogeneousPoly& b) { return a -= b; }
  friend HomogeneousPoly operator*(HomogeneousPoly a, const C& s) { return a *= s; }
  friend HomogeneousPoly operator*(const C& s, HomogeneousPoly a) { return a *= s; }
  friend HomogeneousPoly operator-(HomogeneousPoly a) { return a *= C(-1); }

  friend HomogeneousPoly operator*(const HomogeneousPoly& a, const HomogeneousPoly& b) {
    if (a.nvars_ != b.nvars_) throw DimensionError("product of polynomials in different rings");
    HomogeneousPoly out(a.nvars_, a.degree_ + b.degree_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        C c = ca;
        c *= cb;
        out.add_term_unchecked(monomial_product(ma, mb), c);
      }
    }
    return out;
  }

  /// Structural equality (same ring, degree, and terms).
  friend bool operator==(const HomogeneousPoly& a, const HomogeneousPoly& b) {
    return a.nvars_ == b.nvars_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

  HomogeneousPoly pow(int e) const {
    if (e < 0) throw std::invalid_argument("negative polynomial power");
    HomogeneousPoly result = constant(nvars_, C(1));
    HomogeneousPoly base = *this;
    while (e > 0) {
      if (e & 1) result = result * base;
      e >>= 1;
      if (e > 0) base = base * base;
    }
    return result;
  }

  /// Value at a coordinate vector, each coefficient converted to double.
  Complex evaluate(std::span<const Complex> z) const {
    if (z.size() != nvars_) throw DimensionError("evaluation point has the wrong number of coordinates");
    std::vector<std::vector<Complex>> powers(nvars_);
    for (std::size_t v = 0; v < nvars_; ++v) {
      powers[v].resize(static_cast<std::size_t>(degree_) + 1);
      powers[v][0] = 1.0;
      for (int e = 1; e <= degree_; ++e) powers[v][e] = powers[v][e - 1] * z[v];
    }
    Complex s{};
    for (const auto& [m, c] : terms_) {
      Complex t = CoeffTraits<C>::to_complex(c);
      for (std::size_t v = 0; v < nvars_; ++v)
        if (m[v]) t *= powers[v][m[v]];
      s += t;
    }
    return s;
  }

  Complex evaluate(const ProjectivePoint& p) const { return evaluate(p.coords()); }

  /// log|p(z)| - degree * log|z|, independent of the representative.
  double log_abs_scaled(std::span<const Complex> z) const {
    const double n = euclidean_norm(z);
    std::vector<Complex> u(z.begin(), z.end());
    for (Complex& c : u) c /= n;
    return std::log(std::abs(evaluate(u)));
  }

  /// Value in the coefficient ring at a point with coordinates in that ring.
  C evaluate_exact(std::span<const C> z) const {
    if (z.size() != nvars_) throw DimensionError("evaluation point has the wrong number of coordinates");
    std::vector<std::vector<C>> powers(nvars_);
    for (std::size_t v = 0; v < nvars_; ++v) {
      powers[v].reserve(static_cast<std::size_t>(degree_) + 1);
      powers[v].push_back(C(1));
      for (int e = 1; e <= degree_; ++e) powers[v].push_back(powers[v].back() * z[v]);
    }
    C s(0);
    for (const auto& [m, c] : terms_) {
      C t = c;
      for (std::size_t v = 0; v < nvars_; ++v)
        if (m[v]) t *= powers[v][m[v]];
      s += t;
    }
    return s;
  }

  /// d/dx_var; the derivative of a degree-0 polynomial is the zero polynomial of degree 0.
  HomogeneousPoly partial(std::size_t var) const {
    HomogeneousPoly out(nvars_, degree_ > 0 ? degree_ - 1 : 0);
    if (degree_ == 0) return out;
    for (const auto& [m, c] : terms_) {
      if (m[var] == 0) continue;
      Monomial d = m;
      --d[var];
      out.add_term_unchecked(d, c * C(static_cast<long>(m[var])));
    }
    return out;
  }

  /// Euclidean norm of the coefficient vector.
  double coeff_norm() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s += std::norm(CoeffTraits<C>::to_complex(c));
    return std::sqrt(s);
  }

  /// Canonical text in the polynomial grammar, monomials in descending revlex order.
  std::string to_string(const std::vector<std::string>& names = {}) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += CoeffTraits<C>::text(c);
      for (std::size_t v = 0; v < nvars_; ++v) {
        if (m[v] == 0) continue;
        out += "*" + (v < names.size() ? names[v] : "x" + std::to_string(v));
        if (m[v] > 1) out += "^" + std::to_string(m[v]);
      }
    }
    return out;
  }

  /// Insert without the homogeneity check; for internal use by algorithms
  /// whose output degree is known.
  void add_term_unchecked(const Monomial& m, const C& c) {
    if (CoeffTraits<C>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (CoeffTraits<C>::is_zero(it->second)) terms_.erase(it);
    }
  }

 private:
  HomogeneousPoly& accumulate(const HomogeneousPoly& o, bool negate) {
    if (nvars_ != o.nvars_) throw DimensionError("sum of polynomials in different rings");
    if (o.is_zero()) return *this;
    if (is_zero()) {
      degree_ = o.degree_;
    } else if (degree_ != o.degree_) {
      throw InhomogeneousError(degree_, o.degree_);
    }
    for (const auto& [m, c] : o.terms_) add_term_unchecked(m, negate ? -c : c);
    return *this;
  }

  std::size_t nvars_;
  int degree_;
  Terms terms_;
};

using ExactPoly = HomogeneousPoly<GaussianRational>;
using FloatPoly = HomogeneousPoly<Complex>;

inline FloatPoly to_float(const ExactPoly& p) {
  FloatPoly out(p.nvars(), p.degree());
  for (const auto& [m, c] : p.terms()) out.add_term_unchecked(m, c.to_complex());
  return out;
}

inline FloatPoly to_float(const FloatPoly& p) { return p; }

inline ExactPoly to_exact(const FloatPoly& p) {
  ExactPoly out(p.nvars(), p.degree());
  for (const auto& [m, c] : p.terms()) out.add_term_unchecked(m, GaussianRational::from_double(c));
  return out;
}

/// p(g_0, ..., g_{nvars-1}) for polynomials g_i of a common degree.
template <class C>
HomogeneousPoly<C> substitute(const HomogeneousPoly<C>& p, const std::vector<HomogeneousPoly<C>>& g) {
  if (g.size() != p.nvars()) throw DimensionError("substitution needs one polynomial per variable");
  const std::size_t nv = g.front().nvars();
  const int dg = g.front().degree();
  for (const auto& gi : g)
    if (gi.nvars() != nv || (gi.degree() != dg && !gi.is_zero()))
      throw DimensionError("substituted polynomials must share ring and degree");
  std::vector<std::vector<HomogeneousPoly<C>>> powers(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    powers[v].push_back(HomogeneousPoly<C>::constant(nv, C(1)));
  }
  auto power = [&](std::size_t v, int e) -> const HomogeneousPoly<C>& {
    while (static_cast<int>(powers[v].size()) <= e) {
      HomogeneousPoly<C> next = powers[v].back() * g[v];
      if (next.is_zero()) next = HomogeneousPoly<C>(nv, dg * static_cast<int>(powers[v].size()));
      powers[v].push_back(std::move(next));
    }
    return powers[v][e];
  };
  HomogeneousPoly<C> out(nv, p.degree() * dg);
  for (const auto& [m, c] : p.terms()) {
    HomogeneousPoly<C> t = HomogeneousPoly<C>::constant(nv, c);
    for (std::size_t v = 0; v < g.size(); ++v)
      if (m[v]) t = t * power(v, m[v]);
    for (const auto& [mt, ct] : t.terms()) out.add_term_unchecked(mt, ct);
  }
  return out;
}

/// Tuple of homogeneous polynomials of a common degree defining a rational map.
template <class C>
class PolyMap {
 public:
  using Poly = HomogeneousPoly<C>;

  explicit PolyMap(std::vector<Poly> components, bool reduced = false)
      : components_(std::move(components)), reduced_(reduced) {
    if (components_.empty()) throw DimensionError("map needs at least one component");
    const std::size_t nv = components_.front().nvars();
    int degree = -1;
    bool any_nonzero = false;
    for (const Poly& p : components_) {
      if (p.nvars() != nv) throw DimensionError("map components live in different rings");
      if (p.is_zero()) continue;
      any_nonzero = true;
      if (degree >= 0 && p.degree() != degree) throw InhomogeneousError(degree, p.degree());
      degree = p.degree();
    }
    if (!any_nonzero) throw ZeroMapError("every component of the map vanishes identically");
    for (Poly& p : components_)
      if (p.is_zero()) p = Poly(nv, degree);
  }

  std::size_t nvars() const noexcept { return components_.front().nvars(); }
  std::size_t size() const noexcept { return components_.size(); }
  int degree() const noexcept { return components_.front().degree(); }
  bool reduced() const noexcept { return reduced_; }
  const Poly& operator[](std::size_t i) const { return components_[i]; }
  const std::vector<Poly>& components() const noexcept { return components_; }

  std::vector<Complex> evaluate(std::span<const Complex> z) const {
    std::vector<Complex> out;
    out.reserve(components_.size());
    for (const Poly& p : components_) out.push_back(p.evaluate(z));
    return out;
  }

  /// Image of a point; throws IndeterminacyError when all components vanish there.
  ProjectivePoint apply(const ProjectivePoint& p, double tol = 1e-13) const {
    std::vector<Complex> w = evaluate(p.coords());
    double scale = 0.0;
    for (const Poly& c : components_) scale = std::max(scale, c.coeff_norm());
    if (euclidean_norm(w) <= tol * scale) throw IndeterminacyError("point lies on the indeterminacy locus");
    return ProjectivePoint(std::move(w));
  }

  friend bool operator==(const PolyMap& a, const PolyMap& b) { return a.components_ == b.components_; }

  std::string to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (i) out += " : ";
      out += components_[i].to_string();
    }
    return out + "]";
  }

 private:
  std::vector<Poly> components_;
  bool reduced_;
};

using ExactMap = PolyMap<GaussianRational>;
using FloatMap = PolyMap<Complex>;

inline FloatMap to_float(const ExactMap& f) {
  std::vector<FloatPoly> c;
  for (const auto& p : f.components()) c.push_back(to_float(p));
  return FloatMap(std::move(c), f.reduced());
}

/// Raw composition f o g (components f_i(g)), without gcd reduction.
template <class C>
PolyMap<C> compose_raw(const PolyMap<C>& f, const PolyMap<C>& g) {
  if (f.nvars() != g.size()) throw DimensionError("composition needs matching target and source dimensions");
  std::vector<HomogeneousPoly<C>> out;
  for (const auto& fi : f.components()) out.push_back(substitute(fi, g.components()));
  return PolyMap<C>(std::move(out));
}

}  // namespace eqlab
