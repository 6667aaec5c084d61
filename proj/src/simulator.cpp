#include "secaloha/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "secaloha/errors.hpp"
#include "secaloha/rng.hpp"
#include "secaloha/stats.hpp"

namespace secaloha {
namespace {

constexpr std::uint64_t kMaxTrajectoryPoints = 100000;

SimMetrics run_single(const SimConfig& cfg, std::uint64_t stream,
                      std::vector<SlotTraceRow>* trace) {
  const SystemParams& p = cfg.params;
  const int n = p.n_users;
  SplitRng rng(cfg.seed, stream);

  std::vector<std::uint64_t> queue(n, 0);
  std::vector<bool> tx(n, false);

  const std::uint64_t measured_slots = cfg.n_slots - cfg.warmup_slots;
  const std::uint64_t stride = std::max<std::uint64_t>(
      1, measured_slots / kMaxTrajectoryPoints);

  std::uint64_t arrivals = 0, departures = 0, collision_slots = 0;
  std::vector<std::uint64_t> successes(n, 0), empty_slots(n, 0), alone(n, 0);
  std::vector<double> queue_sum(n, 0.0);
  std::vector<std::vector<double>> traj(n);

  for (std::uint64_t slot = 0; slot < cfg.n_slots; ++slot) {
    const bool measured = slot >= cfg.warmup_slots;

    for (int i = 0; i < n; ++i) {
      if (rng.bernoulli(p.arrival[i])) {
        ++queue[i];
        ++arrivals;
      }
    }

    int n_tx = 0, tx_user = -1;
    for (int i = 0; i < n; ++i) {
      const bool has_packet = cfg.dominant_mode || queue[i] > 0;
      tx[i] = has_packet && rng.bernoulli(p.tx_prob[i]);
      if (tx[i]) {
        ++n_tx;
        tx_user = i;
      }
    }

    if (measured) {
      for (int i = 0; i < n; ++i)
        if (queue[i] == 0) ++empty_slots[i];
    }

    bool success = false;
    if (n_tx == 1) {
      success = !rng.bernoulli(p.fail_prob[tx_user]);
      if (measured) {
        ++alone[tx_user];
        if (success) ++successes[tx_user];
      }
      if (success && queue[tx_user] > 0) {
        --queue[tx_user];
        ++departures;
      }
    } else if (n_tx >= 2 && measured) {
      ++collision_slots;
    }

    if (measured) {
      for (int i = 0; i < n; ++i) queue_sum[i] += static_cast<double>(queue[i]);
      if ((slot - cfg.warmup_slots) % stride == 0)
        for (int i = 0; i < n; ++i)
          traj[i].push_back(static_cast<double>(queue[i]));
    }
    if (trace != nullptr) {
      SlotTraceRow row;
      row.slot = slot;
      row.queue = queue;
      row.transmitted.assign(tx.begin(), tx.end());
      row.outcome_user = (n_tx == 1 && success) ? tx_user : -1;
      row.collision = n_tx >= 2;
      trace->push_back(std::move(row));
    }
  }

  SimMetrics m;
  m.throughput_per_user.resize(n);
  m.empty_prob_per_user.resize(n);
  m.clean_tx_fraction_per_user.resize(n);
  m.mean_queue.resize(n);
  m.queue_drift.assign(n, std::numeric_limits<double>::quiet_NaN());
  const double denom = static_cast<double>(measured_slots);
  for (int i = 0; i < n; ++i) {
    m.throughput_per_user[i] = static_cast<double>(successes[i]) / denom;
    m.throughput_total += m.throughput_per_user[i];
    m.empty_prob_per_user[i] = static_cast<double>(empty_slots[i]) / denom;
    m.clean_tx_fraction_per_user[i] = static_cast<double>(alone[i]) / denom;
    m.mean_queue[i] = queue_sum[i] / denom;
  }
  m.collision_fraction = static_cast<double>(collision_slots) / denom;
  m.total_arrivals = arrivals;
  m.total_departures = departures;
  for (int i = 0; i < n; ++i) m.final_queue_total += queue[i];

  const bool verdict_possible = traj[0].size() >= 1000;
  std::vector<bool> verdict(n, false);
  for (int i = 0; i < n; ++i) {
    if (verdict_possible) {
      const auto d = detect_stability(traj[i], static_cast<double>(stride),
                                      cfg.drift_threshold);
      m.queue_drift[i] = d.drift;
      verdict[i] = d.stable;
    } else if (traj[i].size() >= 2) {
      // Drift is still informative on short runs; no verdict though.
      const auto half = traj[i].size() / 2;
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double k = static_cast<double>(traj[i].size() - half);
      for (std::size_t t = half; t < traj[i].size(); ++t) {
        const double x = static_cast<double>(t) * static_cast<double>(stride);
        sx += x;
        sy += traj[i][t];
        sxx += x * x;
        sxy += x * traj[i][t];
      }
      const double det = k * sxx - sx * sx;
      if (det != 0.0) m.queue_drift[i] = (k * sxy - sx * sy) / det;
    }
  }
  if (verdict_possible) m.stable_verdict = verdict;
  return m;
}

}  // namespace

void validate(const SimConfig& cfg) {
  validate(cfg.params);
  if (cfg.n_slots < 1) throw DomainError("n_slots must be >= 1");
  if (cfg.warmup_slots >= cfg.n_slots)
    throw DomainError("warmup_slots must be smaller than n_slots");
  if (cfg.replications < 1) throw DomainError("replications must be >= 1");
  if (!(cfg.drift_threshold > 0.0))
    throw DomainError("drift_threshold must be > 0");
}

DriftResult detect_stability(std::span<const double> queue_sizes,
                             double slots_per_point, double drift_threshold) {
  if (queue_sizes.size() < 1000)
    throw InsufficientData("need at least 1000 trajectory points");
  if (!(slots_per_point > 0.0))
    throw DomainError("slots_per_point must be > 0");

  const std::size_t half = queue_sizes.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(queue_sizes.size() - half);
  for (std::size_t t = half; t < queue_sizes.size(); ++t) {
    const double x = static_cast<double>(t) * slots_per_point;
    sx += x;
    sy += queue_sizes[t];
    sxx += x * x;
    sxy += x * queue_sizes[t];
  }
  const double det = k * sxx - sx * sx;
  const double slope = det != 0.0 ? (k * sxy - sx * sy) / det : 0.0;

  double first_mean = 0.0;
  for (std::size_t t = 0; t < half; ++t) first_mean += queue_sizes[t];
  first_mean /= static_cast<double>(half);

  DriftResult r;
  r.drift = slope;
  r.stable = slope < drift_threshold &&
             queue_sizes.back() < 10.0 * first_mean + 10.0;
  return r;
}

SimMetrics run_simulation(const SimConfig& config) {
  validate(config);
  return run_single(config, 0, nullptr);
}

SimMetrics run_simulation_traced(const SimConfig& config,
                                 std::vector<SlotTraceRow>* trace) {
  validate(config);
  return run_single(config, 0, trace);
}

SimMetrics run_replications(const SimConfig& config) {
  validate(config);
  const int reps = config.replications;
  const int n = config.params.n_users;

  std::vector<SimMetrics> runs(reps);
  if (reps > 1) {
    std::vector<std::future<SimMetrics>> futs;
    futs.reserve(reps);
    for (int r = 0; r < reps; ++r)
      futs.push_back(std::async(std::launch::async, [&config, r] {
        return run_single(config, static_cast<std::uint64_t>(r), nullptr);
      }));
    for (int r = 0; r < reps; ++r) runs[r] = futs[r].get();
  } else {
    runs[0] = run_single(config, 0, nullptr);
  }

  SimMetrics agg;
  agg.replications = reps;
  agg.throughput_per_user.assign(n, 0.0);
  agg.empty_prob_per_user.assign(n, 0.0);
  agg.clean_tx_fraction_per_user.assign(n, 0.0);
  agg.mean_queue.assign(n, 0.0);
  agg.queue_drift.assign(n, 0.0);

  std::vector<RunningStat> st_thr(n), st_empty(n), st_clean(n), st_queue(n);
  RunningStat st_coll, st_total;
  std::vector<int> stable_votes(n, 0);
  bool any_verdict = true;
  for (const auto& run : runs) {
    for (int i = 0; i < n; ++i) {
      st_thr[i].add(run.throughput_per_user[i]);
      st_empty[i].add(run.empty_prob_per_user[i]);
      st_clean[i].add(run.clean_tx_fraction_per_user[i]);
      st_queue[i].add(run.mean_queue[i]);
      agg.queue_drift[i] += run.queue_drift[i] / static_cast<double>(reps);
    }
    st_coll.add(run.collision_fraction);
    st_total.add(run.throughput_total);
    agg.total_arrivals += run.total_arrivals;
    agg.total_departures += run.total_departures;
    agg.final_queue_total += run.final_queue_total;
    if (run.stable_verdict.has_value()) {
      for (int i = 0; i < n; ++i)
        if ((*run.stable_verdict)[i]) ++stable_votes[i];
    } else {
      any_verdict = false;
    }
  }

  for (int i = 0; i < n; ++i) {
    agg.throughput_per_user[i] = st_thr[i].mean;
    agg.empty_prob_per_user[i] = st_empty[i].mean;
    agg.clean_tx_fraction_per_user[i] = st_clean[i].mean;
    agg.mean_queue[i] = st_queue[i].mean;
  }
  agg.collision_fraction = st_coll.mean;
  agg.throughput_total = st_total.mean;

  if (any_verdict) {
    std::vector<bool> verdict(n);
    for (int i = 0; i < n; ++i) verdict[i] = 2 * stable_votes[i] > reps;
    agg.stable_verdict = verdict;
  }

  if (reps >= 2) {
    SimMetricsCi ci;
    ci.throughput.resize(n);
    ci.empty_prob.resize(n);
    ci.clean_tx.resize(n);
    ci.mean_queue.resize(n);
    const double z = 1.96;
    for (int i = 0; i < n; ++i) {
      ci.throughput[i] = z * st_thr[i].std_error();
      ci.empty_prob[i] = z * st_empty[i].std_error();
      ci.clean_tx[i] = z * st_clean[i].std_error();
      ci.mean_queue[i] = z * st_queue[i].std_error();
    }
    ci.collision = z * st_coll.std_error();
    ci.throughput_total = z * st_total.std_error();
    agg.ci = std::move(ci);
  }
  return agg;
}

}  // namespace secaloha
