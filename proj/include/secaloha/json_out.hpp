#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "secaloha/channel.hpp"
#include "secaloha/optimizer.hpp"
#include "secaloha/regions.hpp"
#include "secaloha/simulator.hpp"

namespace secaloha {

// All emitters produce nlohmann ordered JSON with a schema_version field and
// no timestamps or machine identifiers, so identical inputs serialize to
// identical bytes.
using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

Json capacity_record_json(int user, const std::string& kind,
                          const CapacityEstimate& est);
Json capacity_json(const ChannelParams& params, const RhoResult& rho);

Json condition_json(const ConditionVerdict& verdict);
Json region_json(const SystemParams& params, CaseLabel label,
                 bool joint_nonempty, const ConditionVerdict& dominant_stable,
                 const ConditionVerdict& dominant_secure,
                 const EmptyProbs& empty_probs,
                 const ConditionVerdict& original_stable,
                 const ConditionVerdict& original_secure,
                 const SecrecyThresholds* thresholds);

Json optim_result_json(const OptimResult& result);
Json optimize_json(const OptimResult& closed_form, const OptimResult& oracle,
                   int oracle_resolution);

Json sim_metrics_json(const SimMetrics& metrics);
Json simulate_json(const SimConfig& config, const SimMetrics& metrics);

std::string boundaries_csv(const std::vector<BoundaryPolyline>& polylines);
std::string trace_csv(const std::vector<SlotTraceRow>& rows, int n_users);

struct SweepRow {
  double value = 0.0;
  SimMetrics metrics;
};
std::string sweep_csv(const std::string& param, const std::vector<SweepRow>& rows,
                      int n_users);
Json sweep_json(const std::string& param, const std::vector<SweepRow>& rows);

/// Creates parent directories as needed and writes content byte-for-byte.
void write_file(const std::string& path, const std::string& content);

}  // namespace secaloha
