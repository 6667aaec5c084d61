#pragma once

#include <cstdint>
#include <vector>

#include "secaloha/rng.hpp"

namespace secaloha {

/**
 * Rayleigh-fading uplink with N users. Power gains are exponential; the
 * uplink gain of user i has mean mean_gain_base[i] and the gain from user i
 * to eavesdropping user j has mean mean_gain_cross[i * n_users + j]
 * (row-major, diagonal unused).
 */
struct ChannelParams {
  int n_users = 2;
  double power = 1.0;
  std::vector<double> mean_gain_base;
  std::vector<double> mean_gain_cross;

  double cross(int i, int j) const {
    return mean_gain_cross[static_cast<std::size_t>(i) * n_users + j];
  }
};

/// Throws DomainError unless n_users >= 2, power > 0 and all used means are
/// strictly positive.
void validate(const ChannelParams& params);

struct ChannelState {
  std::vector<double> gain_base;   // N entries
  std::vector<double> gain_cross;  // N*N row-major, diagonal zero
};

struct CapacityEstimate {
  double value = 0.0;       // bits/use, never negative
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t n_conditioning_hits = 0;
  bool floored_at_zero = false;  // raw mean was negative and clamped to 0
};

/// How per-sample rate differences enter the secrecy average.
enum class SecrecyAveraging {
  RawDifference,  // average signed differences, floor the mean at 0
  PositivePart,   // clip each sample difference at 0 before averaging
};

/// One draw of every gain in the system. Deterministic in (params, seed).
ChannelState sample_channel_state(const ChannelParams& params, std::uint64_t seed);
ChannelState sample_channel_state(const ChannelParams& params, SplitRng& rng);

/**
 * Monte Carlo secrecy rate of `user`: conditioned on its uplink gain being
 * the largest (ties to the lowest index), average log2(1+P*uplink) -
 * log2(1+P*crosslink_j) per state and take the minimum over eavesdroppers j.
 * std_error reports the minimizing term. Throws ZeroConditioningHits when no
 * sample lands in the conditioning set.
 */
CapacityEstimate estimate_secrecy_capacity(
    int user, const ChannelParams& params, std::uint64_t n_samples,
    std::uint64_t seed, SecrecyAveraging mode = SecrecyAveraging::RawDifference);

/// Unconditioned Monte Carlo mean of log2(1 + P * uplink_gain).
CapacityEstimate estimate_ergodic_capacity(int user, const ChannelParams& params,
                                           std::uint64_t n_samples,
                                           std::uint64_t seed);

/**
 * Mean of log2(1 + P * uplink_gain) conditioned on `user` holding the largest
 * uplink gain. Shares the sample stream layout of estimate_secrecy_capacity,
 * so same-seed calls see identical states (paired comparisons).
 */
CapacityEstimate estimate_conditional_capacity(int user,
                                               const ChannelParams& params,
                                               std::uint64_t n_samples,
                                               std::uint64_t seed);

struct RhoResult {
  std::vector<double> rho;            // clamped to [0, 1]
  std::vector<bool> clamped;          // true where the raw ratio exceeded 1
  int clamp_events = 0;
  std::vector<CapacityEstimate> secrecy;
  std::vector<CapacityEstimate> ergodic;
};

/**
 * Secrecy-to-rate ratio per user: clamp(secrecy / ergodic, 0, 1). Throws
 * DegenerateCapacity when any ergodic estimate is non-positive. Clamping is
 * never silent; events are counted and flagged per user.
 */
RhoResult compute_rho(const ChannelParams& params, std::uint64_t n_samples,
                      std::uint64_t seed,
                      SecrecyAveraging mode = SecrecyAveraging::RawDifference);

/**
 * Probability that a Rayleigh link of the given mean gain cannot carry
 * target_rate at transmit power `power`: 1 - exp(-(2^rate - 1)/(power*mean)).
 */
double outage_failure_prob(double target_rate, double power, double mean_gain);

}  // namespace secaloha
