#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqlab/projective.hpp"

namespace eqlab {

enum class TestFunctionKind {
  Constant,         // 1
  CoordinateWeight, // |z_i|^2 / |z|^2
  RealCross,        // Re(z_i conj z_j) / |z|^2
  ImagCross,        // Im(z_i conj z_j) / |z|^2
  QuarticWeight,    // |z_i|^2 |z_j|^2 / |z|^4
};

/// Smooth function on P^k built from |z_j|^2 and Re/Im of monomial ratios, so
/// its Fubini-Study integral is known in closed form.
class TestFunction {
 public:
  static TestFunction constant(std::size_t k);
  static TestFunction coordinate_weight(std::size_t k, std::size_t i);
  static TestFunction real_cross(std::size_t k, std::size_t i, std::size_t j);
  static TestFunction imag_cross(std::size_t k, std::size_t i, std::size_t j);
  static TestFunction quartic_weight(std::size_t k, std::size_t i, std::size_t j);

  /// Parses ids produced by id(): "const", "psi0", "re01", "im01", "quartic01".
  static TestFunction from_id(const std::string& id, std::size_t k);

  TestFunctionKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return k_; }
  std::string id() const;

  /// Value at any nonzero representative (the function is scale invariant).
  double operator()(std::span<const Complex> z) const;
  double operator()(const ProjectivePoint& p) const { return (*this)(p.coords()); }

  /// A priori bound on the C^2 norm.
  double c2_norm_bound() const;

  /// Integral against the Fubini-Study probability measure of P^k.
  std::optional<double> fs_integral() const;
  /// Integral against m_FS on RP^k.
  std::optional<double> real_fs_integral() const;

 private:
  TestFunction(TestFunctionKind kind, std::size_t k, std::size_t i, std::size_t j);

  TestFunctionKind kind_;
  std::size_t k_;
  std::size_t i_;
  std::size_t j_;
};

/// psi_0..psi_k, which sum to 1 pointwise.
std::vector<TestFunction> coordinate_weights(std::size_t k);

/// psi_0..psi_k together with Re and Im of z_0 conj z_1.
std::vector<TestFunction> builtin_test_functions(std::size_t k);

}  // namespace eqlab
