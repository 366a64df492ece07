#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace scan2map {

/// SplitMix64 output mixer (Steele, Lea, Flood 2014 / Vigna's public-domain
/// reference). Also used standalone to derive substream seeds.
inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Deterministic counter-based generator (SplitMix64): the state advances by
/// the 64-bit golden-ratio increment and each output is splitmix64_mix(state).
/// The integer stream is bit-identical on every platform and build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64_mix(state_);
  }

  /// Uniform double in [0, 1): top 53 bits of the next output.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

  /// Standard normal via Box-Muller on the uniform stream. Consumes exactly
  /// two outputs per call; the sine variate is discarded so that draw index k
  /// always maps to stream positions 2k, 2k+1.
  double next_gaussian() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double next_gaussian(double sigma) { return sigma * next_gaussian(); }

 private:
  std::uint64_t state_;
};

/// Seed for substream (a, b) of a run seed. Chained SplitMix64 mixing with
/// fixed odd multipliers; documented so any consumer can reproduce a stream
/// from (seed, a, b) alone.
inline constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t a,
                                                  std::uint64_t b) {
  std::uint64_t s = splitmix64_mix(seed ^ 0x6A09E667F3BCC909ULL);
  s = splitmix64_mix(s ^ (a * 0xA0761D6478BD642FULL));
  s = splitmix64_mix(s ^ (b * 0xE7037ED1A0B428DBULL));
  return s;
}

/// FNV-1a over the bytes of an identifier, for hashing string pose ids into
/// the stream-derivation scheme.
inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace scan2map
