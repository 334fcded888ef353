#include "eqlab/rng.hpp"

#include <cmath>

namespace eqlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t index) const {
  return Rng(splitmix64(seed_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double Rng::uniform() { return uniform_(engine_); }

double Rng::normal() { return normal_(engine_); }

std::complex<double> Rng::complex_normal() {
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

std::size_t Rng::below(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

std::uint64_t Rng::next_u64() { return engine_(); }

}  // namespace eqlab
