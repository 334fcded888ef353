#include "eqlab/measure.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "eqlab/errors.hpp"

namespace eqlab {

static_assert(std::endian::native == std::endian::little, "point lists assume a little-endian host");

EmpiricalMeasure::EmpiricalMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const Atom& a : atoms_)
    if (!(a.weight >= 0.0)) throw Error("empirical measure weights must be nonnegative");
}

void EmpiricalMeasure::add(ProjectivePoint p, double weight) {
  if (!(weight >= 0.0)) throw Error("empirical measure weights must be nonnegative");
  if (!atoms_.empty() && atoms_.front().point.dim() != p.dim())
    throw DimensionError("empirical measure atoms must share a dimension");
  atoms_.push_back({std::move(p), weight});
}

double EmpiricalMeasure::total() const {
  return integrate([](const ProjectivePoint&) { return 1.0; });
}

void EmpiricalMeasure::normalize() {
  const double t = total();
  if (!(t > 0.0)) throw Error("cannot normalize a zero measure");
  for (Atom& a : atoms_) a.weight /= t;
}

namespace {

template <class T>
void put(std::ostream& out, T v) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) throw Error("truncated point list");
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

constexpr std::array<char, 4> kMagic{'E', 'Q', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_point_list(std::ostream& out, const EmpiricalMeasure& mu) {
  const std::uint32_t k = mu.empty() ? 0 : static_cast<std::uint32_t>(mu.atoms().front().point.dim());
  out.write(kMagic.data(), kMagic.size());
  put(out, kVersion);
  put(out, k);
  put(out, static_cast<std::uint64_t>(mu.size()));
  for (const Atom& a : mu.atoms()) {
    put(out, a.weight);
    for (const Complex& c : a.point.coords()) {
      put(out, c.real());
      put(out, c.imag());
    }
  }
  if (!out) throw Error("failed to write point list");
}

EmpiricalMeasure read_point_list(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error("not a point list");
  if (get<std::uint32_t>(in) != kVersion) throw Error("unsupported point list version");
  const auto k = get<std::uint32_t>(in);
  const auto count = get<std::uint64_t>(in);
  EmpiricalMeasure mu;
  for (std::uint64_t n = 0; n < count; ++n) {
    const double w = get<double>(in);
    std::vector<Complex> z(k + 1);
    for (Complex& c : z) {
      const double re = get<double>(in);
      const double im = get<double>(in);
      c = {re, im};
    }
    mu.add(ProjectivePoint(std::move(z)), w);
  }
  return mu;
}

}  // namespace eqlab
