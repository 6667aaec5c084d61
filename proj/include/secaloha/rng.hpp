#pragma once

#include <cmath>
#include <cstdint>

namespace secaloha {

/**
 * Counter-based splittable generator.
 *
 * Every stream is keyed by (seed, stream id) and each output is a pure
 * function of (key, counter), so replications, users and sample batches can
 * own disjoint streams and be evaluated in any order (or in parallel) while
 * reproducing bit-identical draws. The mixing function is the splitmix64
 * finalizer applied to a Weyl sequence on the counter.
 */
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(derive_key(seed, stream)) {}

  std::uint64_t next_u64() noexcept { return mix(key_ + (counter_++) * kGamma); }

  /// Uniform double in [0, 1).
  double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Exponential with the given mean (mean >= 0; mean 0 yields 0).
  double exponential(double mean) noexcept {
    return -mean * std::log1p(-uniform01());
  }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix(mix(seed + kGamma) ^ mix(stream + 0xD1B54A32D192ED03ull));
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace secaloha
