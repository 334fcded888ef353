#include "eqlab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace eqlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kAberthFirstDegree = 40;

/// p(z)/p'(z), evaluated through the reversed polynomial outside the unit disc
/// so that large roots do not overflow.
Complex newton_ratio(std::span<const Complex> c, Complex z) {
  const std::size_t d = c.size() - 1;
  if (std::abs(z) <= 1.0) {
    Complex p = c[d], dp = 0.0;
    for (std::size_t j = d; j-- > 0;) {
      dp = dp * z + p;
      p = p * z + c[j];
    }
    return p / dp;
  }
  const Complex w = 1.0 / z;
  Complex r = c[0], dr = 0.0;
  for (std::size_t j = 1; j <= d; ++j) {
    dr = dr * w + r;
    r = r * w + c[j];
  }
  return z * r / (static_cast<double>(d) * r - w * dr);
}

void aberth_polish(std::span<const Complex> c, std::vector<Complex>& z, int max_iter) {
  const std::size_t d = z.size();
  std::vector<char> done(d, 0);
  for (int it = 0; it < max_iter; ++it) {
    bool all_done = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (done[i]) continue;
      const Complex n = newton_ratio(c, z[i]);
      if (!std::isfinite(n.real()) || !std::isfinite(n.imag())) {
        done[i] = 1;
        continue;
      }
      Complex s = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      const Complex delta = n / (1.0 - n * s);
      if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) {
        done[i] = 1;
        continue;
      }
      z[i] -= delta;
      if (std::abs(delta) <= 4.0 * kEps * std::max(1.0, std::abs(z[i])))
        done[i] = 1;
      else
        all_done = false;
    }
    if (all_done) return;
  }
}

/// Parlett-Reinsch diagonal balancing with power-of-two scalings.
void balance(Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if ((c + r) < 0.95 * s) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

std::vector<Complex> companion_eigenvalues(std::span<const Complex> c) {
  const std::size_t d = c.size() - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 1; i < d; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < d; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d - 1)) = -c[i] / c[d];
  balance(m);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  std::vector<Complex> out;
  if (solver.info() != Eigen::Success) return out;
  const auto& ev = solver.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  return out;
}

/// Starting points on circles read off the upper convex hull of (j, log|c_j|).
std::vector<Complex> newton_polygon_start(std::span<const Complex> c) {
  const std::size_t d = c.size() - 1;
  std::vector<double> lg(d + 1);
  for (std::size_t j = 0; j <= d; ++j)
    lg[j] = c[j] == Complex{} ? -std::numeric_limits<double>::infinity() : std::log(std::abs(c[j]));
  std::vector<std::size_t> hull;
  for (std::size_t j = 0; j <= d; ++j) {
    if (!std::isfinite(lg[j])) continue;
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (lg[b] - lg[a]) * static_cast<double>(j - a) - (lg[j] - lg[a]) * static_cast<double>(b - a);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(j);
  }
  std::vector<Complex> z;
  z.reserve(d);
  for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
    const std::size_t i = hull[e], k = hull[e + 1];
    const double m = static_cast<double>(k - i);
    const double r = std::exp((lg[i] - lg[k]) / m);
    for (std::size_t j = 0; j < k - i; ++j)
      z.push_back(std::polar(r, 2.0 * std::numbers::pi * static_cast<double>(j) / m + 0.7 * static_cast<double>(e) + 0.4));
  }
  return z;
}

bool converged(std::span<const Complex> c, const std::vector<Complex>& z) {
  for (const Complex& x : z) {
    const Complex n = newton_ratio(c, x);
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    if (std::abs(n) > 1e-10 * std::max(1.0, std::abs(x))) return false;
  }
  return true;
}

}  // namespace

std::vector<Complex> polynomial_roots(std::span<const Complex> c) {
  if (c.size() < 2) return {};
  const std::size_t d = c.size() - 1;
  if (c[d] == Complex{}) throw ZeroPolynomialError("polynomial_roots needs a nonzero leading coefficient");
  if (d == 1) return {-c[0] / c[1]};
  if (d == 2) {
    const Complex disc = std::sqrt(c[1] * c[1] - 4.0 * c[2] * c[0]);
    // Choose the sign that avoids cancellation, then use the product of the roots.
    const Complex q = -0.5 * (c[1] + (std::real(std::conj(c[1]) * disc) >= 0.0 ? disc : -disc));
    if (q == Complex{}) return {0.0, 0.0};
    return {q / c[2], c[0] / q};
  }
  // High degrees: Aberth iterations from the Newton polygon cost O(d^2) per
  // sweep against O(d^3) for the eigenvalue route, which stays as fallback.
  if (d > kAberthFirstDegree) {
    std::vector<Complex> z = newton_polygon_start(c);
    aberth_polish(c, z, 200);
    if (converged(c, z)) return z;
  }
  std::vector<Complex> z = companion_eigenvalues(c);
  if (z.size() != d) {
    z = newton_polygon_start(c);
    aberth_polish(c, z, 2000);
    return z;
  }
  aberth_polish(c, z, 50);
  return z;
}

std::vector<Complex> binary_form_coefficients(const FloatPoly& p) {
  if (p.nvars() != 2) throw DimensionError("binary form expected (two variables)");
  std::vector<Complex> c(static_cast<std::size_t>(p.degree()) + 1);
  for (const auto& [m, v] : p.terms()) c[m[0]] = v;
  return c;
}

std::vector<Root> cluster_points(const std::vector<ProjectivePoint>& points, double radius) {
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (chordal_distance(points[i], points[j]) < radius) parent[find(i)] = find(j);
  // Each cluster is represented by the phase-aligned mean of its members,
  // which is far more accurate than any single member of a multiple root.
  std::vector<std::size_t> slot(n, n);
  std::vector<std::vector<Complex>> sums;
  std::vector<std::size_t> first;
  std::vector<int> counts;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] == n) {
      slot[r] = sums.size();
      sums.emplace_back(points[i].coords().begin(), points[i].coords().end());
      first.push_back(i);
      counts.push_back(1);
      continue;
    }
    const std::size_t s = slot[r];
    const Complex overlap = hermitian_product(points[i].coords(), points[first[s]].coords());
    const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0};
    for (std::size_t c = 0; c < sums[s].size(); ++c) sums[s][c] += phase * points[i][c];
    ++counts[s];
  }
  std::vector<Root> out;
  out.reserve(sums.size());
  for (std::size_t s = 0; s < sums.size(); ++s) {
    if (counts[s] == 1) {
      out.push_back({points[first[s]], 1});
    } else {
      out.push_back({ProjectivePoint(std::move(sums[s])), counts[s]});
    }
  }
  return out;
}

std::vector<Root> univariate_roots_dense(std::span<const Complex> coeffs) {
  std::size_t lo = 0, hi = coeffs.size();
  while (lo < hi && coeffs[lo] == Complex{}) ++lo;
  if (lo == hi) throw ZeroPolynomialError("roots of the zero polynomial");
  while (coeffs[hi - 1] == Complex{}) --hi;
  const int degree = static_cast<int>(coeffs.size()) - 1;
  std::vector<Root> out;
  // c_j = 0 for j < lo: x0^lo divides p, a root at [0:1].
  if (lo > 0) out.push_back({ProjectivePoint{0.0, 1.0}, static_cast<int>(lo)});
  const auto finite = polynomial_roots(coeffs.subspan(lo, hi - lo));
  std::vector<ProjectivePoint> pts;
  pts.reserve(finite.size());
  for (const Complex& z : finite) pts.push_back(from_affine(z));
  for (Root& r : cluster_points(pts)) out.push_back(std::move(r));
  const int at_infinity = degree - static_cast<int>(hi - 1);
  if (at_infinity > 0) out.push_back({ProjectivePoint{1.0, 0.0}, at_infinity});
  return out;
}

std::vector<Root> univariate_roots(const FloatPoly& p) {
  if (p.is_zero()) throw ZeroPolynomialError("roots of the zero polynomial");
  return univariate_roots_dense(binary_form_coefficients(p));
}

std::vector<Root> univariate_roots(const ExactPoly& p) { return univariate_roots(to_float(p)); }

std::vector<ProjectivePoint> expand_roots(const std::vector<Root>& roots) {
  std::vector<ProjectivePoint> out;
  for (const Root& r : roots)
    for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.point);
  return out;
}

int total_multiplicity(const std::vector<Root>& roots) {
  int s = 0;
  for (const Root& r : roots) s += r.multiplicity;
  return s;
}

double relative_residual(const FloatPoly& p, const ProjectivePoint& z) {
  return std::abs(p.evaluate(z)) / p.coeff_norm();
}

LineRestriction restrict_to_line(const FloatPoly& p, const ProjectivePoint& a, const ProjectivePoint& b) {
  if (a.dim() + 1 != p.nvars() || b.dim() + 1 != p.nvars())
    throw DimensionError("restrict_to_line: point and polynomial dimensions differ");
  if (chordal_distance(a, b) < kPointTolerance) throw CoincidentPointsError("restrict_to_line needs distinct points");
  const int n = p.degree();
  const std::size_t m = static_cast<std::size_t>(n) + 1;
  const std::size_t nv = p.nvars();
  // Values q(w^j, 1) = p(w^j a + b) at the (n+1)-th roots of unity, then an
  // inverse DFT for the coefficients of s^i t^(n-i).
  std::vector<Complex> values(m);
  double scale = 0.0;
  std::vector<Complex> z(nv);
  std::vector<std::vector<double>> abs_pow(nv, std::vector<double>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
    for (std::size_t v = 0; v < nv; ++v) z[v] = w * a[v] + b[v];
    values[j] = p.evaluate(z);
    for (std::size_t v = 0; v < nv; ++v) {
      abs_pow[v][0] = 1.0;
      for (std::size_t e = 1; e < m; ++e) abs_pow[v][e] = abs_pow[v][e - 1] * std::abs(z[v]);
    }
    double s = 0.0;
    for (const auto& [mono, c] : p.terms()) {
      double t = std::abs(c);
      for (std::size_t v = 0; v < nv; ++v) t *= abs_pow[v][mono[v]];
      s += t;
    }
    scale = std::max(scale, s);
  }
  LineRestriction out{FloatPoly(2, n), false};
  double vmax = 0.0;
  for (const Complex& v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax <= 1e-12 * scale) {
    out.vanishes = true;
    return out;
  }
  std::vector<Complex> coeffs(m);
  for (std::size_t i = 0; i < m; ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      s += values[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((i * j) % m) / static_cast<double>(m));
    coeffs[i] = s / static_cast<double>(m);
  }
  const double chop = 4.0 * kEps * static_cast<double>(m) * scale;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(coeffs[i]) <= chop) continue;
    Monomial mono{};
    mono[0] = static_cast<std::uint16_t>(i);
    mono[1] = static_cast<std::uint16_t>(n - static_cast<int>(i));
    out.poly.add_term(mono, coeffs[i]);
  }
  if (out.poly.is_zero()) out.vanishes = true;
  return out;
}

}  // namespace eqlab
