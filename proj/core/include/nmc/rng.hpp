#pragma once

#include <cstdint>
#include <random>

namespace nmc {

/// Seeded random stream with platform-independent output.
///
/// std::mt19937_64 is fully specified by the standard; uniform variates are
/// built from its raw bits here rather than through std::uniform_real_distribution,
/// whose algorithm is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for worker `index`, derived from (seed, index) only.
  static Rng substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard exponential variate.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace nmc
