#include "eqlab/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "eqlab/gcd.hpp"

namespace eqlab {

namespace {

/// Dense coefficients in x2 of p(v0, v1, x2).
template <class T, class C>
std::vector<T> coefficients_in_x2(const HomogeneousPoly<C>& p, const T& v0, const T& v1) {
  const int d = p.degree();
  std::vector<T> p0(static_cast<std::size_t>(d) + 1, T(1)), p1(p0);
  for (int e = 1; e <= d; ++e) {
    p0[e] = p0[e - 1] * v0;
    p1[e] = p1[e - 1] * v1;
  }
  std::vector<T> out(static_cast<std::size_t>(d) + 1, T(0));
  for (const auto& [m, c] : p.terms()) {
    T t;
    if constexpr (std::is_same_v<T, Complex>) {
      t = CoeffTraits<C>::to_complex(c);
    } else {
      t = c;
    }
    t *= p0[m[0]];
    t *= p1[m[1]];
    out[m[2]] += t;
  }
  return out;
}

/// Sylvester matrix of a (degree da) and b (degree db), coefficients stored by power.
template <class T>
std::vector<std::vector<T>> sylvester(const std::vector<T>& a, const std::vector<T>& b) {
  const std::size_t da = a.size() - 1, db = b.size() - 1, n = da + db;
  std::vector<std::vector<T>> m(n, std::vector<T>(n, T(0)));
  for (std::size_t r = 0; r < db; ++r)
    for (std::size_t j = 0; j <= da; ++j) m[r][r + j] = a[da - j];
  for (std::size_t r = 0; r < da; ++r)
    for (std::size_t j = 0; j <= db; ++j) m[db + r][r + j] = b[db - j];
  return m;
}

GaussianRational exact_determinant(std::vector<std::vector<GaussianRational>> m) {
  const std::size_t n = m.size();
  GaussianRational det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n) return GaussianRational(0);
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    const GaussianRational inv = GaussianRational(1) / m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col].is_zero()) continue;
      const GaussianRational f = m[r][col] * inv;
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

Complex float_determinant(const std::vector<std::vector<Complex>>& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  if (n == 0) return 1.0;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m[i][j];
  return a.partialPivLu().determinant();
}

void require_x2_leading(const auto& p) {
  if (p.nvars() != 3) throw DimensionError("resultant_x2 needs polynomials in three variables");
  Monomial lead{};
  lead[2] = static_cast<std::uint16_t>(p.degree());
  if (CoeffTraits<typename std::decay_t<decltype(p)>::Coeff>::is_zero(p.coefficient(lead)))
    throw Error("resultant_x2 needs a nonzero x2^degree coefficient");
}

ExactPoly shear(const ExactPoly& p, long alpha, long beta) {
  auto var = [&](std::size_t v) { return ExactPoly::variable(3, v); };
  return substitute(p, {var(0) + var(2) * GaussianRational(alpha), var(1) + var(2) * GaussianRational(beta), var(2)});
}

/// Newton's (2x2 Jacobian) refinement of a simple common zero in the affine
/// chart of its largest coordinate.
ProjectivePoint polish(const FloatPoly& p, const FloatPoly& q, const ProjectivePoint& z0) {
  const std::array<FloatPoly, 3> dp{p.partial(0), p.partial(1), p.partial(2)};
  const std::array<FloatPoly, 3> dq{q.partial(0), q.partial(1), q.partial(2)};
  std::size_t chart = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(z0[i]) > std::abs(z0[chart])) chart = i;
  std::vector<Complex> z(z0.coords().begin(), z0.coords().end());
  const Complex pivot = z[chart];
  for (Complex& c : z) c /= pivot;
  std::array<std::size_t, 2> free{};
  for (std::size_t i = 0, k = 0; i < 3; ++i)
    if (i != chart) free[k++] = i;
  ProjectivePoint best = z0;
  double best_res = common_zero_residual(p, q, z0);
  for (int it = 0; it < 6 && best_res > 0.0; ++it) {
    const Complex fp = p.evaluate(z), fq = q.evaluate(z);
    Eigen::Matrix2cd j;
    for (std::size_t c = 0; c < 2; ++c) {
      j(0, static_cast<Eigen::Index>(c)) = dp[free[c]].evaluate(z);
      j(1, static_cast<Eigen::Index>(c)) = dq[free[c]].evaluate(z);
    }
    const Eigen::Vector2cd step = j.fullPivLu().solve(Eigen::Vector2cd(fp, fq));
    if (!step.allFinite()) break;
    z[free[0]] -= step(0);
    z[free[1]] -= step(1);
    ProjectivePoint cand(z);
    const double res = common_zero_residual(p, q, cand);
    if (!(res < best_res)) break;
    best = std::move(cand);
    best_res = res;
  }
  return best;
}

}  // namespace

ExactPoly resultant_x2(const ExactPoly& p, const ExactPoly& q) {
  require_x2_leading(p);
  require_x2_leading(q);
  const int n = p.degree() * q.degree();
  // Values of the resultant at x0 = j, x1 = 1, interpolated by Newton divided differences.
  std::vector<GaussianRational> xs, ys;
  for (int j = 0; j <= n; ++j) {
    const GaussianRational x(static_cast<long>(j));
    xs.push_back(x);
    ys.push_back(exact_determinant(sylvester(coefficients_in_x2(p, x, GaussianRational(1)),
                                             coefficients_in_x2(q, x, GaussianRational(1)))));
  }
  std::vector<GaussianRational> dd = ys;
  for (int level = 1; level <= n; ++level)
    for (int i = n; i >= level; --i) dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
  std::vector<GaussianRational> coeffs(static_cast<std::size_t>(n) + 1, GaussianRational(0));
  for (int i = n; i >= 0; --i) {
    // coeffs <- coeffs * (x - xs[i]) + dd[i]
    for (int k = n; k >= 1; --k) coeffs[k] = coeffs[k - 1] - coeffs[k] * xs[i];
    coeffs[0] = dd[i] - coeffs[0] * xs[i];
  }
  ExactPoly out(2, n);
  for (int i = 0; i <= n; ++i) {
    Monomial m{};
    m[0] = static_cast<std::uint16_t>(i);
    m[1] = static_cast<std::uint16_t>(n - i);
    out.add_term_unchecked(m, coeffs[i]);
  }
  return out;
}

FloatPoly resultant_x2(const FloatPoly& p, const FloatPoly& q) {
  require_x2_leading(p);
  require_x2_leading(q);
  const int n = p.degree() * q.degree();
  const std::size_t m = static_cast<std::size_t>(n) + 1;
  std::vector<Complex> values(m);
  double vmax = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
    values[j] = float_determinant(sylvester(coefficients_in_x2(p, w, Complex(1.0)),
                                            coefficients_in_x2(q, w, Complex(1.0))));
    vmax = std::max(vmax, std::abs(values[j]));
  }
  FloatPoly out(2, n);
  for (std::size_t i = 0; i < m; ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      s += values[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((i * j) % m) / static_cast<double>(m));
    s /= static_cast<double>(m);
    if (std::abs(s) <= 1e-14 * static_cast<double>(m) * vmax) continue;
    Monomial mono{};
    mono[0] = static_cast<std::uint16_t>(i);
    mono[1] = static_cast<std::uint16_t>(n - static_cast<int>(i));
    out.add_term_unchecked(mono, s);
  }
  return out;
}

ExactPoly sheared_resultant(const ExactPoly& p, const ExactPoly& q) {
  for (long radius = 0; radius < 50; ++radius) {
    for (long alpha = -radius; alpha <= radius; ++alpha) {
      for (long beta = -radius; beta <= radius; ++beta) {
        if (std::max(std::abs(alpha), std::abs(beta)) != radius) continue;
        const std::vector<GaussianRational> at{GaussianRational(alpha), GaussianRational(beta), GaussianRational(1)};
        if (p.evaluate_exact(at).is_zero() || q.evaluate_exact(at).is_zero()) continue;
        return resultant_x2(shear(p, alpha, beta), shear(q, alpha, beta));
      }
    }
  }
  throw Error("no admissible shear found");
}

bool share_factor(const ExactPoly& p, const ExactPoly& q) {
  if (p.is_zero() || q.is_zero()) return true;
  if (p.degree() == 0 || q.degree() == 0) return false;
  return sheared_resultant(p, q).is_zero();
}

FloatPoly change_frame(const FloatPoly& p, const Eigen::MatrixXcd& u) {
  const std::size_t n = p.nvars();
  std::vector<FloatPoly> lin;
  for (std::size_t i = 0; i < n; ++i) {
    FloatPoly l(n, 1);
    for (std::size_t j = 0; j < n; ++j) {
      Monomial m{};
      m[j] = 1;
      l.add_term(m, u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    lin.push_back(std::move(l));
  }
  return substitute(p, lin);
}

double common_zero_residual(const FloatPoly& p, const FloatPoly& q, const ProjectivePoint& z) {
  return std::max(std::abs(p.evaluate(z)) / p.coeff_norm(), std::abs(q.evaluate(z)) / q.coeff_norm());
}

std::vector<Root> bivariate_common_zeros(const FloatPoly& p, const FloatPoly& q, Rng& rng) {
  if (p.nvars() != 3 || q.nvars() != 3) throw DimensionError("bivariate_common_zeros works in P^2");
  if (p.is_zero() || q.is_zero()) throw CommonFactorError("zero polynomial has every point as a common zero");
  if (p.degree() < 1 || q.degree() < 1) throw DimensionError("bivariate_common_zeros needs positive degrees");
  const int expected = p.degree() * q.degree();
  constexpr double kResidual = 1e-6;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const Eigen::MatrixXcd u = random_unitary(3, rng);
    const FloatPoly pp = change_frame(p, u), qq = change_frame(q, u);
    const FloatPoly res = resultant_x2(pp, qq);
    if (res.is_zero()) throw CommonFactorError("resultant vanishes identically");
    std::vector<Root> out;
    bool ok = true;
    for (const Root& r : univariate_roots(res)) {
      const Complex u0 = r.point[0], u1 = r.point[1];
      const auto pc = coefficients_in_x2(pp, u0, u1);
      std::vector<ProjectivePoint> cands;
      for (const Complex& t : polynomial_roots(pc)) cands.push_back(ProjectivePoint{u0, u1, t});
      std::vector<Root> distinct = cluster_points(cands);
      std::vector<std::pair<double, ProjectivePoint>> hits;
      for (const Root& c : distinct) {
        const double rr = common_zero_residual(pp, qq, c.point);
        if (rr < kResidual) hits.emplace_back(rr, c.point);
      }
      if (hits.size() != 1) {
        ok = false;
        break;
      }
      ProjectivePoint y = hits.front().second;
      if (r.multiplicity == 1) y = polish(pp, qq, y);
      out.push_back({transform(u, y), r.multiplicity});
    }
    if (!ok || total_multiplicity(out) != expected) continue;
    if (std::all_of(out.begin(), out.end(),
                    [&](const Root& r) { return common_zero_residual(p, q, r.point) < kResidual; }))
      return out;
  }
  throw ConditioningError("common zeros stayed ambiguous after frame retries");
}

std::vector<Root> bivariate_common_zeros(const ExactPoly& p, const ExactPoly& q, Rng& rng) {
  if (share_factor(p, q)) throw CommonFactorError("polynomials share a common factor");
  return bivariate_common_zeros(to_float(p), to_float(q), rng);
}

}  // namespace eqlab
