#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eqlab/rng.hpp"
#include "eqlab/stats.hpp"

namespace eqlab {

using Complex = std::complex<double>;

/// Two points closer than this in chordal distance are the same point.
inline constexpr double kPointTolerance = 1e-12;

/// A point of P^k stored by a unit representative whose first nonzero
/// coordinate is real and positive.
class ProjectivePoint {
 public:
  explicit ProjectivePoint(std::vector<Complex> coords);
  ProjectivePoint(std::initializer_list<Complex> coords);

  std::size_t dim() const noexcept { return coords_.size() - 1; }
  std::span<const Complex> coords() const noexcept { return coords_; }
  const Complex& operator[](std::size_t i) const { return coords_[i]; }

  /// True when every coordinate of the normalized form has |imag| <= tol.
  bool is_real(double tol = 1e-12) const;

  friend bool operator==(const ProjectivePoint& a, const ProjectivePoint& b);

 private:
  std::vector<Complex> coords_;
};

/// sum conj(a_i) b_i
Complex hermitian_product(std::span<const Complex> a, std::span<const Complex> b);
double euclidean_norm(std::span<const Complex> z);

/// sqrt(1 - |<p,q>|^2) for unit representatives, computed from the orthogonal
/// residual so that nearby points keep full relative precision.
double chordal_distance(const ProjectivePoint& p, const ProjectivePoint& q);

/// Fubini-Study distributed point (normalized complex Gaussian vector).
ProjectivePoint sample_point_fs(std::size_t k, Rng& rng);

/// m_FS distributed point of RP^k (normalized real Gaussian vector).
ProjectivePoint sample_point_real(std::size_t k, Rng& rng);

/// Point at chordal distance exactly `radius` from p in a random direction.
/// With `real_directions`, a real p stays on RP^k.
ProjectivePoint perturb(const ProjectivePoint& p, double radius, Rng& rng,
                        bool real_directions = false);

/// Haar-distributed unitary matrix.
Eigen::MatrixXcd random_unitary(std::size_t n, Rng& rng);

/// Homogeneous coordinates multiplied by m.
ProjectivePoint transform(const Eigen::MatrixXcd& m, const ProjectivePoint& p);

/// Affine coordinate z0/z1 of a point of P^1 (infinite at [1:0]).
Complex affine_coordinate(const ProjectivePoint& p);
ProjectivePoint from_affine(Complex z);

/// Monte Carlo estimate of the integral of log|z_1| over the unit sphere of C^{k+1}.
Estimate sphere_log_modulus_integral(std::size_t k, std::size_t n_samples, Rng& rng);

/// Closed form of the same integral: -(1 + 1/2 + ... + 1/k) / 2.
double sphere_log_modulus_exact(std::size_t k);

/// Normalization constant c_{k,l} of the multiprojective Kahler form on
/// (P^k)^l, from (c_{k,l})^{-kl} = C(kl,k) C(kl-k,k) ... C(2k,k).
double multiproj_normalization(int k, int l);

/// Fubini-Study probability of the chordal ball of the given radius in P^k: r^{2k}.
double chordal_ball_volume(std::size_t k, double radius);

}  // namespace eqlab
