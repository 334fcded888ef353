#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace eqlab {

/// Seeded random stream. Streams are split deterministically by index, so a
/// trial's randomness depends only on (master seed, trial index) and never on
/// scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent child stream for `index`. Does not advance this stream.
  Rng split(std::uint64_t index) const;

  std::uint64_t seed() const noexcept { return seed_; }

  double uniform();
  double normal();
  /// Standard complex Gaussian, E|z|^2 = 1.
  std::complex<double> complex_normal();
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);
  std::uint64_t next_u64();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace eqlab
