#include "secaloha/channel.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "secaloha/errors.hpp"
#include "secaloha/stats.hpp"

namespace secaloha {
namespace {

// Samples are split into a fixed number of logical batches, each owning its
// own stream, so the result does not depend on how batches are scheduled.
constexpr int kBatches = 16;
constexpr std::uint64_t kUserStreamStride = 1024;
constexpr std::uint64_t kParallelThreshold = 100000;

void draw_state(const ChannelParams& p, SplitRng& rng, ChannelState& out) {
  const int n = p.n_users;
  for (int i = 0; i < n; ++i) out.gain_base[i] = rng.exponential(p.mean_gain_base[i]);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      out.gain_cross[static_cast<std::size_t>(i) * n + j] =
          rng.exponential(p.cross(i, j));
    }
  }
}

// Index of the largest uplink gain, ties to the lowest index.
int argmax_base(const ChannelState& s) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(s.gain_base.size()); ++i) {
    if (s.gain_base[i] > s.gain_base[best]) best = i;
  }
  return best;
}

std::uint64_t batch_size(std::uint64_t n_samples, int batch) {
  const std::uint64_t base = n_samples / kBatches;
  return base + (static_cast<std::uint64_t>(batch) < n_samples % kBatches ? 1 : 0);
}

void check_user(int user, const ChannelParams& p) {
  if (user < 0 || user >= p.n_users)
    throw DomainError("user index " + std::to_string(user) + " out of range");
}

// Runs `body(batch, rng)` over all batches, in parallel for large sample
// counts, and merges the per-batch accumulators in batch order.
template <typename Batch, typename Body>
std::vector<Batch> run_batches(int user, std::uint64_t n_samples,
                               std::uint64_t seed, Body body) {
  std::vector<Batch> partial(kBatches);
  auto run_one = [&](int b) {
    SplitRng rng(seed, static_cast<std::uint64_t>(user) * kUserStreamStride + b);
    body(b, rng, partial[b]);
  };
  if (n_samples >= kParallelThreshold) {
    std::vector<std::future<void>> futs;
    futs.reserve(kBatches);
    for (int b = 0; b < kBatches; ++b)
      futs.push_back(std::async(std::launch::async, run_one, b));
    for (auto& f : futs) f.get();
  } else {
    for (int b = 0; b < kBatches; ++b) run_one(b);
  }
  return partial;
}

}  // namespace

void validate(const ChannelParams& p) {
  if (p.n_users < 2) throw DomainError("channel needs at least 2 users");
  if (!(p.power > 0.0)) throw DomainError("power must be > 0");
  if (p.mean_gain_base.size() != static_cast<std::size_t>(p.n_users))
    throw DomainError("mean_gain_base must have n_users entries");
  if (p.mean_gain_cross.size() !=
      static_cast<std::size_t>(p.n_users) * p.n_users)
    throw DomainError("mean_gain_cross must have n_users^2 entries");
  for (double m : p.mean_gain_base)
    if (!(m > 0.0)) throw DomainError("mean_gain_base entries must be > 0");
  for (int i = 0; i < p.n_users; ++i)
    for (int j = 0; j < p.n_users; ++j)
      if (i != j && !(p.cross(i, j) > 0.0))
        throw DomainError("mean_gain_cross entries must be > 0");
}

ChannelState sample_channel_state(const ChannelParams& params, SplitRng& rng) {
  validate(params);
  ChannelState s;
  s.gain_base.resize(params.n_users);
  s.gain_cross.assign(static_cast<std::size_t>(params.n_users) * params.n_users, 0.0);
  draw_state(params, rng, s);
  return s;
}

ChannelState sample_channel_state(const ChannelParams& params, std::uint64_t seed) {
  SplitRng rng(seed, 0);
  return sample_channel_state(params, rng);
}

CapacityEstimate estimate_secrecy_capacity(int user, const ChannelParams& params,
                                           std::uint64_t n_samples,
                                           std::uint64_t seed,
                                           SecrecyAveraging mode) {
  validate(params);
  check_user(user, params);
  if (n_samples == 0) throw DomainError("n_samples must be >= 1");
  const int n = params.n_users;
  const double power = params.power;

  using Batch = std::vector<RunningStat>;  // one accumulator per eavesdropper
  auto partial = run_batches<Batch>(
      user, n_samples, seed, [&](int b, SplitRng& rng, Batch& stats) {
        stats.assign(n, RunningStat{});
        ChannelState s;
        s.gain_base.resize(n);
        s.gain_cross.assign(static_cast<std::size_t>(n) * n, 0.0);
        const std::uint64_t count = batch_size(n_samples, b);
        for (std::uint64_t k = 0; k < count; ++k) {
          draw_state(params, rng, s);
          if (argmax_base(s) != user) continue;
          const double cap = std::log2(1.0 + power * s.gain_base[user]);
          for (int j = 0; j < n; ++j) {
            if (j == user) continue;
            const double leak = std::log2(
                1.0 + power * s.gain_cross[static_cast<std::size_t>(user) * n + j]);
            double diff = cap - leak;
            if (mode == SecrecyAveraging::PositivePart && diff < 0.0) diff = 0.0;
            stats[j].add(diff);
          }
        }
      });

  std::vector<RunningStat> merged(n);
  for (const auto& batch : partial)
    for (int j = 0; j < n; ++j) merged[j].merge(batch[j]);

  const std::uint64_t hits = merged[user == 0 ? 1 : 0].n;
  if (hits == 0)
    throw ZeroConditioningHits("no sample had user " + std::to_string(user) +
                               " holding the largest uplink gain");

  int worst = user == 0 ? 1 : 0;
  for (int j = 0; j < n; ++j) {
    if (j == user) continue;
    if (merged[j].mean < merged[worst].mean) worst = j;
  }

  CapacityEstimate est;
  est.n_samples = n_samples;
  est.n_conditioning_hits = hits;
  est.std_error = merged[worst].std_error();
  est.floored_at_zero = merged[worst].mean < 0.0;
  est.value = est.floored_at_zero ? 0.0 : merged[worst].mean;
  return est;
}

CapacityEstimate estimate_ergodic_capacity(int user, const ChannelParams& params,
                                           std::uint64_t n_samples,
                                           std::uint64_t seed) {
  validate(params);
  check_user(user, params);
  if (n_samples == 0) throw DomainError("n_samples must be >= 1");
  const int n = params.n_users;
  const double power = params.power;

  auto partial = run_batches<RunningStat>(
      user, n_samples, seed, [&](int b, SplitRng& rng, RunningStat& stat) {
        ChannelState s;
        s.gain_base.resize(n);
        s.gain_cross.assign(static_cast<std::size_t>(n) * n, 0.0);
        const std::uint64_t count = batch_size(n_samples, b);
        for (std::uint64_t k = 0; k < count; ++k) {
          draw_state(params, rng, s);
          stat.add(std::log2(1.0 + power * s.gain_base[user]));
        }
      });

  RunningStat merged;
  for (const auto& stat : partial) merged.merge(stat);

  CapacityEstimate est;
  est.value = merged.mean;
  est.std_error = merged.std_error();
  est.n_samples = n_samples;
  est.n_conditioning_hits = n_samples;
  return est;
}

CapacityEstimate estimate_conditional_capacity(int user,
                                               const ChannelParams& params,
                                               std::uint64_t n_samples,
                                               std::uint64_t seed) {
  validate(params);
  check_user(user, params);
  if (n_samples == 0) throw DomainError("n_samples must be >= 1");
  const int n = params.n_users;
  const double power = params.power;

  auto partial = run_batches<RunningStat>(
      user, n_samples, seed, [&](int b, SplitRng& rng, RunningStat& stat) {
        ChannelState s;
        s.gain_base.resize(n);
        s.gain_cross.assign(static_cast<std::size_t>(n) * n, 0.0);
        const std::uint64_t count = batch_size(n_samples, b);
        for (std::uint64_t k = 0; k < count; ++k) {
          draw_state(params, rng, s);
          if (argmax_base(s) != user) continue;
          stat.add(std::log2(1.0 + power * s.gain_base[user]));
        }
      });

  RunningStat merged;
  for (const auto& stat : partial) merged.merge(stat);
  if (merged.n == 0)
    throw ZeroConditioningHits("no sample had user " + std::to_string(user) +
                               " holding the largest uplink gain");

  CapacityEstimate est;
  est.value = merged.mean;
  est.std_error = merged.std_error();
  est.n_samples = n_samples;
  est.n_conditioning_hits = merged.n;
  return est;
}

RhoResult compute_rho(const ChannelParams& params, std::uint64_t n_samples,
                      std::uint64_t seed, SecrecyAveraging mode) {
  validate(params);
  RhoResult out;
  const int n = params.n_users;
  out.rho.resize(n);
  out.clamped.assign(n, false);
  out.ergodic.reserve(n);
  out.secrecy.reserve(n);

  for (int i = 0; i < n; ++i) {
    out.ergodic.push_back(estimate_ergodic_capacity(i, params, n_samples, seed));
    if (!(out.ergodic.back().value > 0.0))
      throw DegenerateCapacity("ergodic rate of user " + std::to_string(i) +
                               " is not positive");
  }
  for (int i = 0; i < n; ++i) {
    out.secrecy.push_back(
        estimate_secrecy_capacity(i, params, n_samples, seed, mode));
    double ratio = out.secrecy.back().value / out.ergodic[i].value;
    if (ratio > 1.0) {
      ratio = 1.0;
      out.clamped[i] = true;
      ++out.clamp_events;
    }
    out.rho[i] = ratio;
  }
  return out;
}

double outage_failure_prob(double target_rate, double power, double mean_gain) {
  if (target_rate < 0.0) throw DomainError("target_rate must be >= 0");
  if (!(power > 0.0)) throw DomainError("power must be > 0");
  if (!(mean_gain > 0.0)) throw DomainError("mean_gain must be > 0");
  const double threshold = std::exp2(target_rate) - 1.0;
  return -std::expm1(-threshold / (power * mean_gain));
}

}  // namespace secaloha
