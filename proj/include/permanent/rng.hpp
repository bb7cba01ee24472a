#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace permanent::rng {

/// SplitMix64 step. Advances `state` and returns the next output word.
/// Used only to expand seeds into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives a child seed from (seed, tag). Distinct tags give decorrelated
/// child seeds, so independent consumers can share one user-facing seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ull * (tag + 1));
  splitmix64(state);
  return splitmix64(state);
}

/// xoshiro256++ with SplitMix64 seeding. All draws are pure functions of the
/// seeding material and the call sequence, independent of platform libm state,
/// which is what makes results bit-reproducible for a fixed worker count.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t st = seed;
    for (auto& w : state_) w = splitmix64(st);
  }

  /// Generator for worker `stream` of a run keyed by `seed`. Streams with
  /// different ids start from decorrelated state.
  static Xoshiro256pp substream(std::uint64_t seed, std::uint64_t stream) {
    return Xoshiro256pp(derive_seed(seed, stream));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [-1, 1).
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  /// +1 or -1 with equal probability.
  double rademacher() { return (next() >> 63) ? 1.0 : -1.0; }

  /// Standard normal via the Marsaglia polar method. One spare value is
  /// cached, so draws come in deterministic pairs per stream.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform_pm1();
      v = uniform_pm1();
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace permanent::rng
