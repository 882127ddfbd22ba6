#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>

namespace cfss {

/// Source of the non-keyed randomness: the first feedback value, the per-section
/// feedback index p, section padding and the MSB fill. Unseeded instances draw
/// from the OS; seeded ones are reproducible, and `derive` gives child streams
/// that depend only on (seed, salt).
class EntropySource {
 public:
  EntropySource() : seed_(std::nullopt) {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    engine_.seed(seq);
  }

  explicit EntropySource(std::uint64_t seed) : seed_(seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    engine_.seed(seq);
  }

  bool seeded() const { return seed_.has_value(); }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). Modulo bias is below 2^-56 for the bounds used here.
  std::uint32_t below(std::uint32_t bound) { return static_cast<std::uint32_t>(engine_() % bound); }

  bool bit() { return (engine_() >> 63) != 0; }

  /// Independent stream for one purpose. Seeded sources mix the salt into the
  /// seed; unseeded ones return fresh OS entropy.
  EntropySource derive(std::uint64_t salt) const {
    if (!seed_) return EntropySource();
    return EntropySource(mix(*seed_ ^ mix(salt + 0x9e3779b97f4a7c15ULL)));
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::optional<std::uint64_t> seed_;
  std::mt19937_64 engine_;
};

/// 64-bit FNV-1a, used to salt derived entropy streams with content.
inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cfss
