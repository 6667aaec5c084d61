#pragma once

#include <cmath>
#include <cstdint>

namespace secaloha {

/**
 * Welford accumulator with Chan's pairwise merge. Partial results from
 * separate sample batches combine without catastrophic cancellation, and the
 * merged result is independent of how batches were scheduled as long as the
 * merge order is fixed.
 */
struct RunningStat {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const RunningStat& other) noexcept {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    const double total = na + nb;
    const double delta = other.mean - mean;
    mean += delta * nb / total;
    m2 += other.m2 + delta * delta * na * nb / total;
    n += other.n;
  }

  double variance() const noexcept {
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  }

  double std_error() const noexcept {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

}  // namespace secaloha
