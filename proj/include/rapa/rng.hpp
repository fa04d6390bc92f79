#ifndef RAPA_RNG_HPP
#define RAPA_RNG_HPP

#include <cstdint>
#include <string_view>

namespace rapa {

/// Counter-based generator: draw k of a stream is a pure function of
/// (seed, stream, k), so independent purposes never shift each other's draws.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept : key_(mix(seed ^ mix(stream))) {}
  CounterRng(std::uint64_t seed, std::string_view stream) noexcept
      : CounterRng(seed, stream_id(stream)) {}

  [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix(key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  [[nodiscard]] double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  [[nodiscard]] double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(counter);
  }

  /// FNV-1a of the stream name.
  [[nodiscard]] static constexpr std::uint64_t stream_id(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace rapa

#endif  // RAPA_RNG_HPP
