#include "eqlab/projective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <gmpxx.h>

#include "eqlab/errors.hpp"

namespace eqlab {

namespace {

void normalize_in_place(std::vector<Complex>& z) {
  const double n = euclidean_norm(z);
  if (!(n > 0.0) || !std::isfinite(n))
    throw DimensionError("projective point needs a finite nonzero coordinate vector");
  Complex phase{1.0, 0.0};
  for (const Complex& c : z) {
    if (c != Complex{}) {
      phase = std::conj(c) / std::abs(c);
      break;
    }
  }
  const Complex scale = phase / n;
  for (Complex& c : z) c *= scale;
  // The leading coordinate is real by construction; drop rounding residue.
  for (Complex& c : z) {
    if (c != Complex{}) {
      c = Complex{std::abs(c), 0.0};
      break;
    }
  }
}

}  // namespace

ProjectivePoint::ProjectivePoint(std::vector<Complex> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw DimensionError("projective point needs at least two coordinates");
  normalize_in_place(coords_);
}

ProjectivePoint::ProjectivePoint(std::initializer_list<Complex> coords)
    : ProjectivePoint(std::vector<Complex>(coords)) {}

bool ProjectivePoint::is_real(double tol) const {
  return std::all_of(coords_.begin(), coords_.end(),
                     [tol](const Complex& c) { return std::abs(c.imag()) <= tol; });
}

bool operator==(const ProjectivePoint& a, const ProjectivePoint& b) {
  return a.dim() == b.dim() && chordal_distance(a, b) < kPointTolerance;
}

Complex hermitian_product(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double euclidean_norm(std::span<const Complex> z) {
  double scale = 0.0;
  for (const Complex& c : z) scale = std::max({scale, std::abs(c.real()), std::abs(c.imag())});
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (const Complex& c : z) s += std::norm(c / scale);
  return scale * std::sqrt(s);
}

double chordal_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  if (p.dim() != q.dim()) throw DimensionError("chordal distance between different dimensions");
  const Complex overlap = hermitian_product(q.coords(), p.coords());
  double s = 0.0;
  for (std::size_t i = 0; i < p.coords().size(); ++i) s += std::norm(p[i] - overlap * q[i]);
  return std::min(1.0, std::sqrt(s));
}

ProjectivePoint sample_point_fs(std::size_t k, Rng& rng) {
  if (k < 1) throw DimensionError("sample_point_fs needs k >= 1");
  std::vector<Complex> z(k + 1);
  for (Complex& c : z) c = rng.complex_normal();
  return ProjectivePoint(std::move(z));
}

ProjectivePoint sample_point_real(std::size_t k, Rng& rng) {
  if (k < 1) throw DimensionError("sample_point_real needs k >= 1");
  std::vector<Complex> z(k + 1);
  for (Complex& c : z) c = Complex{rng.normal(), 0.0};
  return ProjectivePoint(std::move(z));
}

ProjectivePoint perturb(const ProjectivePoint& p, double radius, Rng& rng, bool real_directions) {
  const std::size_t n = p.coords().size();
  radius = std::clamp(radius, 0.0, 1.0);
  for (;;) {
    std::vector<Complex> v(n);
    for (Complex& c : v) c = real_directions ? Complex{rng.normal(), 0.0} : rng.complex_normal();
    const Complex overlap = hermitian_product(p.coords(), v);
    for (std::size_t i = 0; i < n; ++i) v[i] -= overlap * p[i];
    const double vn = euclidean_norm(v);
    if (vn < 1e-12) continue;
    const double s = radius;
    const double c = std::sqrt(1.0 - s * s);
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = c * p[i] + (s / vn) * v[i];
    return ProjectivePoint(std::move(out));
  }
}

Eigen::MatrixXcd random_unitary(std::size_t n, Rng& rng) {
  Eigen::MatrixXcd g(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

ProjectivePoint transform(const Eigen::MatrixXcd& m, const ProjectivePoint& p) {
  if (static_cast<std::size_t>(m.cols()) != p.coords().size())
    throw DimensionError("transform: matrix and point dimensions differ");
  Eigen::VectorXcd v(p.coords().size());
  for (std::size_t i = 0; i < p.coords().size(); ++i) v(i) = p[i];
  const Eigen::VectorXcd w = m * v;
  return ProjectivePoint(std::vector<Complex>(w.data(), w.data() + w.size()));
}

Complex affine_coordinate(const ProjectivePoint& p) {
  if (p.dim() != 1) throw DimensionError("affine_coordinate is defined on P^1");
  if (p[1] == Complex{}) return {std::numeric_limits<double>::infinity(), 0.0};
  return p[0] / p[1];
}

ProjectivePoint from_affine(Complex z) {
  if (std::abs(z) > 1.0) return ProjectivePoint{Complex{1.0, 0.0}, 1.0 / z};
  return ProjectivePoint{z, Complex{1.0, 0.0}};
}

Estimate sphere_log_modulus_integral(std::size_t k, std::size_t n_samples, Rng& rng) {
  if (k < 1) throw DimensionError("sphere_log_modulus_integral needs k >= 1");
  if (n_samples < 1000) throw std::invalid_argument("sphere_log_modulus_integral needs >= 1000 samples");
  RunningStats stats;
  std::vector<Complex> z(k + 1);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (Complex& c : z) c = rng.complex_normal();
    stats.add(std::log(std::abs(z[1])) - std::log(euclidean_norm(z)));
  }
  return stats.estimate();
}

double sphere_log_modulus_exact(std::size_t k) {
  double h = 0.0;
  for (std::size_t n = 1; n <= k; ++n) h += 1.0 / static_cast<double>(n);
  return -0.5 * h;
}

double multiproj_normalization(int k, int l) {
  if (k < 1 || l < 1) throw std::invalid_argument("multiproj_normalization needs k, l >= 1");
  if (l == 1) return 1.0;
  mpz_class product = 1;
  for (int j = 2; j <= l; ++j) {
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(j * k), static_cast<unsigned long>(k));
    product *= binom;
  }
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, product.get_mpz_t());
  const double log_product = std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
  return std::exp(-log_product / static_cast<double>(k * l));
}

double chordal_ball_volume(std::size_t k, double radius) {
  const double r = std::clamp(radius, 0.0, 1.0);
  return std::pow(r * r, static_cast<double>(k));
}

}  // namespace eqlab
