#pragma once

#include <cstdint>

namespace sadic {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based generator: value n of substream (seed, stream) is
/// mix64(key + n * golden) with key = mix64(seed ^ mix64(stream + golden)).
/// Any draw can be recomputed without replaying earlier ones.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed ^ mix64(stream + kGolden))) {}

  constexpr std::uint64_t at(std::uint64_t counter) const { return mix64(key_ + counter * kGolden); }
  std::uint64_t next() { return at(counter_++); }

  /// Uniform double in [0, 1) with 53 random bits.
  static constexpr double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }
  double uniform() { return to_unit(next()); }
  double uniform_at(std::uint64_t counter) const { return to_unit(at(counter)); }

  std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream ids, kept apart so that directive indices, torus points and
/// auxiliary draws of the same trial never share counters.
namespace streams {
inline constexpr std::uint64_t kDirective = 0;
inline constexpr std::uint64_t kTorus = 1ull << 40;
inline constexpr std::uint64_t kAux = 2ull << 40;
}  // namespace streams

}  // namespace sadic
