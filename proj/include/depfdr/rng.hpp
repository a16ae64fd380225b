#pragma once

// Deterministic random streams.
//
// Every replicate draws from its own engine, seeded from (master seed,
// replicate index) through a 64-bit avalanche mix. The engine is
// std::mt19937_64, whose output sequence is fixed by the standard; the
// conversions to uniform and normal variates are spelled out below instead of
// using the implementation-defined std:: distributions, so results match
// across standard libraries and ports.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace depfdr {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kDefaultMasterSeed = 0x5EEDF00DULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t avalanche_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`: avalanche_mix(master ^ (index+1)*gamma).
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return avalanche_mix(master ^ ((index + 1) * kGoldenGamma));
}

/// Named sub-streams of one replicate stream.
enum class Substream : std::uint64_t { field = 1, pvalues = 2, aux = 3 };

constexpr std::uint64_t substream_seed(std::uint64_t stream, Substream which) noexcept {
  return stream_seed(stream, static_cast<std::uint64_t>(which));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0,1): ((bits >> 11) + 0.5) * 2^-53.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound); rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return r % bound;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal by Box-Muller; the sine branch is cached for the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace depfdr
