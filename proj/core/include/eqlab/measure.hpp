#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "eqlab/projective.hpp"
#include "eqlab/test_function.hpp"

namespace eqlab {

struct Atom {
  ProjectivePoint point;
  double weight = 0.0;
};

/// Weighted point cloud in P^k.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(std::vector<Atom> atoms);

  void add(ProjectivePoint p, double weight);
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  double total() const;
  /// Rescales weights to total 1. Throws on a zero measure.
  void normalize();

  /// sum w_i f(p_i)
  template <class F>
  double integrate(F&& f) const {
    double s = 0.0, c = 0.0;
    for (const Atom& a : atoms_) {
      const double y = a.weight * f(a.point) - c;
      const double t = s + y;
      c = (t - s) - y;
      s = t;
    }
    return s;
  }
  double pair(const TestFunction& psi) const {
    return integrate([&](const ProjectivePoint& p) { return psi(p); });
  }

 private:
  std::vector<Atom> atoms_;
};

/// Binary point list: "EQPT", u32 version, u32 k, u64 count, then per atom the
/// weight followed by k+1 (re, im) pairs, all little-endian doubles.
void write_point_list(std::ostream& out, const EmpiricalMeasure& mu);
EmpiricalMeasure read_point_list(std::istream& in);

}  // namespace eqlab
