#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "secaloha/regions.hpp"

namespace secaloha {

/**
 * Discrete-time queue simulation config. Slots proceed as: Bernoulli
 * arrivals, then transmission decisions (head-of-line packet with probability
 * tx_prob[i]; in dominant_mode users transmit dummies even when empty), then
 * the channel: a lone transmitter succeeds with probability 1 - fail_prob[i],
 * two or more transmitters all fail. Buffers are unbounded. Queue-empty
 * fractions are measured at the transmission epoch (after arrivals).
 */
struct SimConfig {
  SystemParams params;
  std::uint64_t n_slots = 0;
  std::uint64_t warmup_slots = 0;
  std::uint64_t seed = 0;
  bool dominant_mode = false;
  int replications = 1;
  double drift_threshold = 0.01;  // packets/slot
};

/// Throws DomainError unless n_slots >= 1, warmup_slots < n_slots and
/// replications >= 1 (params validated too).
void validate(const SimConfig& config);

struct SimMetricsCi {
  std::vector<double> throughput;
  std::vector<double> empty_prob;
  std::vector<double> clean_tx;
  std::vector<double> mean_queue;
  double collision = 0.0;
  double throughput_total = 0.0;
};

struct SimMetrics {
  std::vector<double> throughput_per_user;  // successful packets per slot
  double throughput_total = 0.0;
  std::vector<double> empty_prob_per_user;
  std::vector<double> clean_tx_fraction_per_user;  // transmitted alone
  double collision_fraction = 0.0;                 // slots with >= 2 transmitters
  std::vector<double> mean_queue;
  std::vector<double> queue_drift;  // packets/slot, least-squares slope
  std::optional<std::vector<bool>> stable_verdict;  // absent on short runs
  std::optional<SimMetricsCi> ci;  // 95% normal CI half-widths (>= 2 reps)
  std::uint64_t total_arrivals = 0;    // counted over all slots incl. warmup
  std::uint64_t total_departures = 0;  // real packets only
  std::uint64_t final_queue_total = 0;
  int replications = 1;
};

struct DriftResult {
  bool stable = false;
  double drift = 0.0;  // packets/slot
};

/**
 * Drift heuristic over one queue trajectory sampled every slots_per_point
 * slots: least-squares slope of the second half must stay below
 * drift_threshold and the final queue below 10x the first-half mean (plus a
 * 10-packet allowance so near-empty queues pass). Throws InsufficientData on
 * fewer than 1000 points.
 */
DriftResult detect_stability(std::span<const double> queue_sizes,
                             double slots_per_point,
                             double drift_threshold = 0.01);

/// Optional per-slot trace row (original queue sizes after the slot resolves).
struct SlotTraceRow {
  std::uint64_t slot = 0;
  std::vector<std::uint64_t> queue;
  std::vector<bool> transmitted;
  int outcome_user = -1;  // successful user, or -1
  bool collision = false;
};

/// One replication (stream 0 of config.seed). Metrics cover post-warmup
/// slots; conservation counters cover the whole run.
SimMetrics run_simulation(const SimConfig& config);

/// Same, optionally appending a per-slot trace (pass nullptr to skip).
SimMetrics run_simulation_traced(const SimConfig& config,
                                 std::vector<SlotTraceRow>* trace);

/**
 * config.replications independent replications (stream r for replication r),
 * averaged, with 95% normal-approximation CI half-widths when replications
 * >= 2. Conservation counters are summed across replications; stability
 * verdicts are the per-user majority.
 */
SimMetrics run_replications(const SimConfig& config);

}  // namespace secaloha
