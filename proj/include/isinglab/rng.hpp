#pragma once

#include <cstdint>

#include "isinglab/types.hpp"

namespace isinglab {

// splitmix64: tiny, seedable, identical stream on every platform.  std::
// distributions are not bit-reproducible across standard libraries, which
// would make frozen test expectations fragile; this generator is.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform angle in (-pi, pi].
  double angle() { return pi - two_pi * uniform01(); }

  cplx on_circle(double radius = 1.0) {
    double t = angle();
    return {radius * std::cos(t), radius * std::sin(t)};
  }

  bool coin() { return (next() & 1ull) != 0; }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }
};

// Decorrelates a base seed into independent per-item streams so that trial k
// is reproducible in isolation.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t item) {
  SplitMix64 g(seed ^ (0x632be59bd9b4e019ull * (item + 1)));
  g.next();
  return g.next();
}

} // namespace isinglab
