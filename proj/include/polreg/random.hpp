#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace polreg {

/// The random engine used everywhere. mt19937_64's output sequence is fixed
/// by the standard, so every draw below is reproducible across toolchains.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based child seed: h = mix64(master), then h = mix64(h ^ mix64(k))
/// for each key in order. Used for (master, T, rep) cells and sub-streams.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k));
  return h;
}

// The std:: distributions are implementation-defined, so the few we need are
// spelled out here on top of the raw 64-bit stream.

/// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n > 0, by rejection (no modulo bias).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  std::uint64_t x = rng();
  while (x < threshold) x = rng();
  return x % n;
}

/// Equiprobable sign from the top bit.
inline int random_sign(Rng& rng) { return (rng() >> 63) ? 1 : -1; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Standard normal via the Marsaglia polar method. Only the first of the
/// pair is returned so the draw is a pure function of the stream position.
inline double standard_normal(Rng& rng) {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

}  // namespace polreg
