#include "eqlab/henon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <gmp.h>

#include "eqlab/errors.hpp"
#include "eqlab/gcd.hpp"
#include "eqlab/parser.hpp"
#include "eqlab/roots.hpp"

namespace eqlab {

namespace {

using UPoly = std::vector<GaussianRational>;  // lowest degree first

constexpr double kEscapeRadius = 1e8;

void trim(UPoly& a) {
  while (a.size() > 1 && a.back().is_zero()) a.pop_back();
}

UPoly add(UPoly a, const UPoly& b) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  trim(a);
  return a;
}

UPoly scale(UPoly a, const GaussianRational& s) {
  for (auto& c : a) c *= s;
  trim(a);
  return a;
}

UPoly mul(const UPoly& a, const UPoly& b) {
  UPoly out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  trim(out);
  return out;
}

// p(Y) by Horner.
UPoly compose(const std::vector<GaussianRational>& p, const UPoly& y) {
  UPoly r{p.back()};
  for (std::size_t k = p.size() - 1; k-- > 0;) r = add(mul(r, y), UPoly{p[k]});
  return r;
}

// log2 |q| rounded down, for q != 0.
long log2_abs(const mpq_class& q) {
  return static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
         static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
}

double scaled_double(const mpq_class& q, long shift) {
  if (sgn(q) == 0) return 0.0;
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  const double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::ldexp(mn / md, static_cast<int>(en - ed - shift));
}

// Coefficients divided by a common power of two so the largest is O(1).
std::vector<Complex> to_scaled_doubles(const UPoly& a) {
  long top = std::numeric_limits<long>::min();
  for (const auto& c : a) {
    if (sgn(c.re()) != 0) top = std::max(top, log2_abs(c.re()));
    if (sgn(c.im()) != 0) top = std::max(top, log2_abs(c.im()));
  }
  if (top == std::numeric_limits<long>::min()) top = 0;
  std::vector<Complex> out;
  out.reserve(a.size());
  for (const auto& c : a) out.emplace_back(scaled_double(c.re(), top), scaled_double(c.im(), top));
  return out;
}

GaussianRational exact(Complex z) { return GaussianRational::from_double(z); }

long checked_bezout(const RegularAutomorphism& f, int n, int m) {
  if (n < 1 || m < 1) throw ContractError("line intersection clouds need n, m >= 1");
  long b = 1;
  for (int i = 0; i < n + m; ++i) {
    b *= f.d_plus();
    if (b > kHenonBezoutLimit)
      throw CostGuardError("d+^n d-^m exceeds " + std::to_string(kHenonBezoutLimit));
  }
  return b;
}

ExactPoly homogenize(const std::vector<GaussianRational>& p, std::size_t var, int degree) {
  // sum p_k v^k t^{degree-k} in variables (x, y, t)
  ExactPoly out(3, degree);
  for (std::size_t k = 0; k < p.size(); ++k) {
    Monomial mono{};
    mono[var] = static_cast<std::uint16_t>(k);
    mono[2] = static_cast<std::uint16_t>(degree - static_cast<int>(k));
    out.add_term(mono, p[k]);
  }
  return out;
}

ExactPoly monomial(std::uint16_t ex, std::uint16_t ey, std::uint16_t et, const GaussianRational& c) {
  Monomial mono{};
  mono[0] = ex;
  mono[1] = ey;
  mono[2] = et;
  return ExactPoly::term(3, mono, c);
}

struct Dual {
  Complex v;
  Complex d;
};

}  // namespace

RegularAutomorphism::RegularAutomorphism(std::vector<GaussianRational> p, GaussianRational a)
    : p_(std::move(p)),
      a_(std::move(a)),
      degree_(0),
      forward_h_({ExactPoly::variable(3, 0), ExactPoly::variable(3, 1), ExactPoly::variable(3, 2)}),
      inverse_h_({ExactPoly::variable(3, 0), ExactPoly::variable(3, 1), ExactPoly::variable(3, 2)}) {
  trim(p_);
  degree_ = static_cast<int>(p_.size()) - 1;
  if (degree_ < 2) throw DimensionError("Hénon maps need deg p >= 2");
  if (a_.is_zero()) throw ContractError("Hénon maps need a != 0");
  for (const auto& c : p_) pf_.push_back(c.to_complex());
  af_ = a_.to_complex();

  const auto d = static_cast<std::uint16_t>(degree_);
  const GaussianRational one(1);
  // f = [y t^{d-1} : p_h(y, t) - a x t^{d-1} : t^d]
  forward_h_ = ExactMap({monomial(0, 1, d - 1, one), homogenize(p_, 1, degree_) - monomial(1, 0, d - 1, a_),
                         monomial(0, 0, d, one)});
  // g = [(p_h(x, t) - y t^{d-1}) / a : x t^{d-1} : t^d]
  const GaussianRational inv_a = one / a_;
  inverse_h_ = ExactMap({(homogenize(p_, 0, degree_) - monomial(0, 1, d - 1, one)) * inv_a,
                         monomial(1, 0, d - 1, one), monomial(0, 0, d, one)});
  const ExactMap id({ExactPoly::variable(3, 0), ExactPoly::variable(3, 1), ExactPoly::variable(3, 2)});
  if (!(compose_and_reduce(forward_h_, inverse_h_) == id) || !(compose_and_reduce(inverse_h_, forward_h_) == id))
    throw ContractError("forward and inverse Hénon maps do not compose to the identity");
}

Complex RegularAutomorphism::p_value(Complex y) const {
  Complex r = pf_.back();
  for (std::size_t k = pf_.size() - 1; k-- > 0;) r = r * y + pf_[k];
  return r;
}

Complex RegularAutomorphism::p_derivative(Complex y) const {
  Complex r = 0.0;
  for (std::size_t k = pf_.size() - 1; k >= 1; --k) r = r * y + static_cast<double>(k) * pf_[k];
  return r;
}

Point2 RegularAutomorphism::forward(const Point2& q) const { return {q[1], p_value(q[1]) - af_ * q[0]}; }

Point2 RegularAutomorphism::inverse(const Point2& q) const { return {(p_value(q[0]) - q[1]) / af_, q[0]}; }

RegularAutomorphism build_regular_automorphism(const std::string& p_text, const GaussianRational& a) {
  return RegularAutomorphism(parse_univariate(p_text, "y"), a);
}

RegularAutomorphism build_regular_automorphism(const std::string& p_text, Complex a) {
  return build_regular_automorphism(p_text, GaussianRational::from_double(a));
}

Complex Line::equation(const Point2& q) const {
  return direction[1] * (q[0] - point[0]) - direction[0] * (q[1] - point[1]);
}

Line random_line(Rng& rng) {
  Line l;
  l.point = {rng.complex_normal(), rng.complex_normal()};
  l.direction = {rng.complex_normal(), rng.complex_normal()};
  return l;
}

LinePair random_line_pair(Rng& rng) {
  LinePair p;
  p.L = random_line(rng);
  p.L_prime = random_line(rng);
  return p;
}

ProjectivePoint embed(const Point2& q) { return ProjectivePoint{q[0], q[1], 1.0}; }

Point2 affine_point(const ProjectivePoint& p) {
  if (p.dim() != 2) throw DimensionError("affine points of C^2 live in P^2");
  if (p[2] == Complex{}) throw ContractError("point lies on the line at infinity");
  return {p[0] / p[2], p[1] / p[2]};
}

std::vector<GaussianRational> intersection_polynomial(const RegularAutomorphism& f, int n, int m,
                                                      const LinePair& pair) {
  checked_bezout(f, n, m);
  const Line& lp = pair.L_prime;
  UPoly x{exact(lp.point[0]), exact(lp.direction[0])};
  UPoly y{exact(lp.point[1]), exact(lp.direction[1])};
  trim(x);
  trim(y);
  const GaussianRational minus_a = -f.a();
  for (int i = 0; i < n + m; ++i) {
    UPoly next_y = add(compose(f.p(), y), scale(x, minus_a));
    x = std::move(y);
    y = std::move(next_y);
  }
  const Line& l = pair.L;
  const GaussianRational alpha = exact(l.direction[1]);
  const GaussianRational beta = -exact(l.direction[0]);
  const GaussianRational gamma = exact(l.direction[0] * l.point[1]) - exact(l.direction[1] * l.point[0]);
  UPoly out = add(add(scale(x, alpha), scale(y, beta)), UPoly{gamma});
  return out;
}

HenonCloud line_intersection_cloud(const RegularAutomorphism& f, int n, int m, const LinePair& pair) {
  const long bezout = checked_bezout(f, n, m);
  const UPoly exact_p = intersection_polynomial(f, n, m, pair);
  if (static_cast<long>(exact_p.size()) - 1 != bezout)
    throw DegenerateLineError("intersection polynomial lost degree; resample the line pair");
  const std::vector<Complex> coeffs = to_scaled_doubles(exact_p);

  const int steps = n + m;
  const Line& lp = pair.L_prime;
  const Complex a = f.a().to_complex();
  // Newton ratio P / P' of P(t) = l_L(f^{n+m}(u(t))) by forward-mode
  // differentiation. Once the orbit is deep in the escaping region,
  // y_{j+1} ~ lc y_j^d and the remaining steps divide the ratio by d each.
  auto dynamic_ratio = [&](Complex t) {
    Dual x{lp.point[0] + t * lp.direction[0], lp.direction[0]};
    Dual y{lp.point[1] + t * lp.direction[1], lp.direction[1]};
    for (int i = 0; i < steps; ++i) {
      if (std::abs(y.v) > 1e30 && std::abs(y.v) > 1e10 * std::abs(x.v))
        return y.v / y.d / std::pow(static_cast<double>(f.d_plus()), steps - i);
      const Dual ny{f.p_value(y.v) - a * x.v, f.p_derivative(y.v) * y.d - a * x.d};
      x = y;
      y = ny;
    }
    const Complex alpha = pair.L.direction[1], beta = -pair.L.direction[0];
    return pair.L.equation({x.v, y.v}) / (alpha * x.d + beta * y.d);
  };

  // Simultaneous Aberth sweeps on the dynamical evaluation, started from the
  // roots of the rounded coefficients, which alone are too ill-conditioned.
  std::vector<Complex> t;
  for (const ProjectivePoint& p : expand_roots(univariate_roots_dense(coeffs))) t.push_back(affine_coordinate(p));
  auto finite = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  std::vector<char> done(t.size(), 0);
  for (int it = 0; it < 1000; ++it) {
    bool all_done = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (done[i]) continue;
      const Complex ratio = dynamic_ratio(t[i]);
      if (!finite(ratio)) {
        all_done = false;
        continue;
      }
      Complex s = 0.0;
      for (std::size_t j = 0; j < t.size(); ++j)
        if (j != i) s += 1.0 / (t[i] - t[j]);
      const Complex delta = ratio / (1.0 - ratio * s);
      if (!finite(delta)) {
        done[i] = 1;
        continue;
      }
      t[i] -= delta;
      if (std::abs(delta) <= 1e-14 * std::max(1.0, std::abs(t[i])))
        done[i] = 1;
      else
        all_done = false;
    }
    if (all_done) break;
  }
  if (std::find(done.begin(), done.end(), 0) != done.end())
    throw ConditioningError("intersection roots did not converge");
  std::vector<Root> roots;
  for (Complex z : t) roots.push_back({from_affine(z), 1});
  roots = cluster_points(expand_roots(roots));

  HenonCloud cloud;
  cloud.n = n;
  cloud.m = m;
  cloud.raw_count = total_multiplicity(roots);
  for (const Root& r : roots) {
    Point2 q = lp.at(affine_coordinate(r.point));
    for (int i = 0; i < m; ++i) q = f.forward(q);
    cloud.measure.add(embed(q), static_cast<double>(r.multiplicity) / static_cast<double>(bezout));
  }
  return cloud;
}

double BoxTestFunction::operator()(const Point2& q) const {
  const double s[4] = {q[0].real(), q[0].imag(), q[1].real(), q[1].imag()};
  double bump = 1.0;
  for (double v : s) {
    const double u = v / 3.0;
    if (std::abs(u) >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    bump *= w * w * w;
  }
  switch (factor_) {
    case Factor::One: return bump;
    case Factor::ReX: return bump * q[0].real();
    case Factor::ImX: return bump * q[0].imag();
    case Factor::ReY: return bump * q[1].real();
    case Factor::ImY: return bump * q[1].imag();
    case Factor::ReXY: return bump * (q[0] * q[1]).real();
    case Factor::AbsX2: return bump * std::norm(q[0]);
  }
  return bump;
}

std::string BoxTestFunction::id() const {
  switch (factor_) {
    case Factor::One: return "bump";
    case Factor::ReX: return "bump_re_x";
    case Factor::ImX: return "bump_im_x";
    case Factor::ReY: return "bump_re_y";
    case Factor::ImY: return "bump_im_y";
    case Factor::ReXY: return "bump_re_xy";
    case Factor::AbsX2: return "bump_abs_x2";
  }
  return "bump";
}

std::vector<BoxTestFunction> box_test_functions() {
  using F = BoxTestFunction::Factor;
  return {BoxTestFunction(F::One), BoxTestFunction(F::ReX),  BoxTestFunction(F::ImX),  BoxTestFunction(F::ReY),
          BoxTestFunction(F::ImY), BoxTestFunction(F::ReXY), BoxTestFunction(F::AbsX2)};
}

double equidistribution_gap(const std::vector<HenonCloud>& clouds, const std::vector<BoxTestFunction>& psis) {
  if (clouds.size() < 2) throw ContractError("a gap needs at least two clouds");
  std::vector<std::vector<double>> pairing(clouds.size());
  for (std::size_t i = 0; i < clouds.size(); ++i)
    for (const auto& psi : psis)
      pairing[i].push_back(clouds[i].measure.integrate([&](const ProjectivePoint& p) { return psi(p); }));
  double gap = 0.0;
  for (std::size_t i = 0; i < clouds.size(); ++i)
    for (std::size_t j = i + 1; j < clouds.size(); ++j)
      for (std::size_t p = 0; p < psis.size(); ++p) gap = std::max(gap, std::abs(pairing[i][p] - pairing[j][p]));
  return gap;
}

double equidistribution_gap(const RegularAutomorphism& f, int n, int m, const std::vector<LinePair>& pairs,
                            const std::vector<BoxTestFunction>& psis) {
  std::vector<HenonCloud> clouds;
  for (const auto& pair : pairs) clouds.push_back(line_intersection_cloud(f, n, m, pair));
  return equidistribution_gap(clouds, psis);
}

namespace {

// d^{-n} log+ |q_n| along an orbit, closed with the escape-rate tail once the
// leading coordinate dominates beyond the escape radius.
template <class Step>
GreenEstimate green(const Point2& q0, int depth, int d, double log_lc, std::size_t lead, Step step) {
  if (depth < 0 || depth > kMaxGreenDepth)
    throw ContractError("Green function depth must lie in [0, " + std::to_string(kMaxGreenDepth) + "]");
  const double tail = log_lc / (d - 1);
  auto escaped = [&](const Point2& q) {
    return std::abs(q[lead]) > kEscapeRadius && std::abs(q[lead]) >= std::abs(q[1 - lead]);
  };
  auto raw = [](const Point2& q) { return std::max(0.0, std::log(std::hypot(std::abs(q[0]), std::abs(q[1])))); };
  Point2 q = q0;
  double scale = 1.0;
  double previous = raw(q);
  for (int j = 0; j <= depth; ++j) {
    if (escaped(q)) {
      const double value = scale * (std::log(std::abs(q[lead])) + tail);
      const Point2 next = step(q);
      const double next_value = scale / d * (std::log(std::abs(next[lead])) + tail);
      return {value, std::abs(next_value - value)};
    }
    const double current = scale * raw(q);
    if (j == depth) return {current, std::abs(current - previous)};
    previous = current;
    q = step(q);
    scale /= d;
  }
  return {previous, 0.0};
}

}  // namespace

GreenEstimate green_plus(const RegularAutomorphism& f, const Point2& q, int depth) {
  const double log_lc = std::log(std::abs(f.p().back().to_complex()));
  return green(q, depth, f.d_plus(), log_lc, 1, [&](const Point2& z) { return f.forward(z); });
}

GreenEstimate green_minus(const RegularAutomorphism& f, const Point2& q, int depth) {
  const double log_lc = std::log(std::abs(f.p().back().to_complex() / f.a().to_complex()));
  return green(q, depth, f.d_minus(), log_lc, 0, [&](const Point2& z) { return f.inverse(z); });
}

}  // namespace eqlab
