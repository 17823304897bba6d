#ifndef MVD_RNG_HPP
#define MVD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace mvd {

/// Deterministic random stream: mt19937_64 with explicit, fixed output maps
/// (no std::*_distribution, whose algorithms vary between standard libraries).
/// Identical seed => identical stream, everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0,1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Exponential with the given rate; uses -log1p(-u), finite for u in [0,1).
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  /// Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mvd

#endif
