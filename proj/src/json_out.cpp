#include "secaloha/json_out.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "secaloha/errors.hpp"

namespace secaloha {
namespace {

// nlohmann serializes NaN as null already; this keeps the intent explicit.
Json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json vec_json(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(finite_or_null(x));
  return arr;
}

Json vec_json(const std::vector<bool>& v) {
  Json arr = Json::array();
  for (bool b : v) arr.push_back(b);
  return arr;
}

void csv_number(std::ostringstream& out, double v) {
  out << Json(finite_or_null(v)).dump();
}

}  // namespace

Json capacity_record_json(int user, const std::string& kind,
                          const CapacityEstimate& est) {
  Json j;
  j["user"] = user;
  j["kind"] = kind;
  j["value"] = est.value;
  j["std_error"] = est.std_error;
  j["n_samples"] = est.n_samples;
  j["n_conditioning_hits"] = est.n_conditioning_hits;
  j["floored_at_zero"] = est.floored_at_zero;
  return j;
}

Json capacity_json(const ChannelParams& params, const RhoResult& rho) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "capacity";
  j["n_users"] = params.n_users;
  j["power"] = params.power;
  Json records = Json::array();
  for (int i = 0; i < params.n_users; ++i)
    records.push_back(capacity_record_json(i, "ergodic", rho.ergodic[i]));
  for (int i = 0; i < params.n_users; ++i)
    records.push_back(capacity_record_json(i, "secrecy", rho.secrecy[i]));
  j["records"] = std::move(records);
  j["rho"] = vec_json(rho.rho);
  j["clamped"] = vec_json(rho.clamped);
  j["clamp_events"] = rho.clamp_events;
  return j;
}

Json condition_json(const ConditionVerdict& verdict) {
  Json j;
  j["ok"] = vec_json(verdict.ok);
  j["margin"] = vec_json(verdict.margin);
  return j;
}

Json region_json(const SystemParams& params, CaseLabel label,
                 bool joint_nonempty, const ConditionVerdict& dominant_stable,
                 const ConditionVerdict& dominant_secure,
                 const EmptyProbs& empty_probs,
                 const ConditionVerdict& original_stable,
                 const ConditionVerdict& original_secure,
                 const SecrecyThresholds* thresholds) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "region";
  j["n_users"] = params.n_users;
  j["arrival"] = vec_json(params.arrival);
  j["tx_prob"] = vec_json(params.tx_prob);
  j["fail_prob"] = vec_json(params.fail_prob);
  j["rho"] = vec_json(params.rho);
  j["case_label"] = to_string(label);
  j["joint_nonempty"] = joint_nonempty;
  j["dominant"]["stable"] = condition_json(dominant_stable);
  j["dominant"]["secure"] = condition_json(dominant_secure);
  j["original"]["p_e"] = vec_json(empty_probs.p_e);
  j["original"]["converged"] = empty_probs.converged;
  j["original"]["iterations"] = empty_probs.iterations;
  j["original"]["residual"] = empty_probs.residual;
  j["original"]["stable"] = condition_json(original_stable);
  j["original"]["secure"] = condition_json(original_secure);
  if (thresholds != nullptr) {
    Json t;
    t["q1_star"] = thresholds->q1_star;
    t["q2_star_star"] = thresholds->q2_star_star;
    t["q2_star"] = thresholds->q2_star;
    t["q1_star_star"] = thresholds->q1_star_star;
    Json points = Json::array();
    points.push_back(Json{{"q1", thresholds->q1_star},
                          {"q2", thresholds->q2_star_star}});
    points.push_back(Json{{"q1", thresholds->q1_star_star},
                          {"q2", thresholds->q2_star}});
    t["points"] = std::move(points);
    j["thresholds"] = std::move(t);
  } else {
    j["thresholds"] = nullptr;
  }
  return j;
}

Json optim_result_json(const OptimResult& result) {
  Json j;
  j["q_opt"] = Json::array({result.q_opt[0], result.q_opt[1]});
  j["throughput"] = result.throughput;
  j["case_label"] = to_string(result.case_label);
  Json act = Json::array();
  for (Constraint c : result.active_constraints) act.push_back(to_string(c));
  j["active_constraints"] = std::move(act);
  j["is_supremum_on_open_boundary"] = result.is_supremum_on_open_boundary;
  if (result.interior_point.has_value()) {
    j["interior_point"] =
        Json::array({(*result.interior_point)[0], (*result.interior_point)[1]});
  } else {
    j["interior_point"] = nullptr;
  }
  Json cands = Json::array();
  for (const auto& cand : result.candidates_evaluated) {
    Json c;
    c["q"] = Json::array({cand.q[0], cand.q[1]});
    c["throughput"] = cand.throughput;
    c["feasible"] = cand.feasible;
    cands.push_back(std::move(c));
  }
  j["candidates_evaluated"] = std::move(cands);
  return j;
}

Json optimize_json(const OptimResult& closed_form, const OptimResult& oracle,
                   int oracle_resolution) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "optimize";
  j["closed_form"] = optim_result_json(closed_form);
  j["oracle"] = optim_result_json(oracle);
  j["oracle_resolution"] = oracle_resolution;
  j["throughput_discrepancy"] =
      std::abs(closed_form.throughput - oracle.throughput);
  return j;
}

Json sim_metrics_json(const SimMetrics& m) {
  Json j;
  j["throughput_per_user"] = vec_json(m.throughput_per_user);
  j["throughput_total"] = m.throughput_total;
  j["empty_prob_per_user"] = vec_json(m.empty_prob_per_user);
  j["clean_tx_fraction_per_user"] = vec_json(m.clean_tx_fraction_per_user);
  j["collision_fraction"] = m.collision_fraction;
  j["mean_queue"] = vec_json(m.mean_queue);
  j["queue_drift"] = vec_json(m.queue_drift);
  if (m.stable_verdict.has_value()) {
    j["stable_verdict"] = vec_json(*m.stable_verdict);
  } else {
    j["stable_verdict"] = nullptr;
  }
  if (m.ci.has_value()) {
    Json ci;
    ci["throughput"] = vec_json(m.ci->throughput);
    ci["throughput_total"] = m.ci->throughput_total;
    ci["empty_prob"] = vec_json(m.ci->empty_prob);
    ci["clean_tx"] = vec_json(m.ci->clean_tx);
    ci["mean_queue"] = vec_json(m.ci->mean_queue);
    ci["collision"] = m.ci->collision;
    j["ci_halfwidth"] = std::move(ci);
  } else {
    j["ci_halfwidth"] = nullptr;
  }
  j["total_arrivals"] = m.total_arrivals;
  j["total_departures"] = m.total_departures;
  j["final_queue_total"] = m.final_queue_total;
  j["replications"] = m.replications;
  return j;
}

Json simulate_json(const SimConfig& config, const SimMetrics& metrics) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "simulate";
  j["n_slots"] = config.n_slots;
  j["warmup_slots"] = config.warmup_slots;
  j["seed"] = config.seed;
  j["dominant_mode"] = config.dominant_mode;
  j["replications"] = config.replications;
  j["metrics"] = sim_metrics_json(metrics);
  return j;
}

std::string boundaries_csv(const std::vector<BoundaryPolyline>& polylines) {
  std::ostringstream out;
  out << "kind,user,q1,q2\n";
  for (const auto& poly : polylines) {
    for (const auto& pt : poly.points) {
      out << to_string(poly.kind) << ',' << poly.user << ',';
      csv_number(out, pt[0]);
      out << ',';
      csv_number(out, pt[1]);
      out << '\n';
    }
  }
  return out.str();
}

std::string trace_csv(const std::vector<SlotTraceRow>& rows, int n_users) {
  std::ostringstream out;
  out << "slot";
  for (int i = 0; i < n_users; ++i) out << ",queue_" << i + 1;
  for (int i = 0; i < n_users; ++i) out << ",tx_" << i + 1;
  out << ",success_user,collision\n";
  for (const auto& row : rows) {
    out << row.slot;
    for (int i = 0; i < n_users; ++i) out << ',' << row.queue[i];
    for (int i = 0; i < n_users; ++i) out << ',' << (row.transmitted[i] ? 1 : 0);
    out << ',' << (row.outcome_user >= 0 ? row.outcome_user + 1 : 0) << ','
        << (row.collision ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::string& param, const std::vector<SweepRow>& rows,
                      int n_users) {
  std::ostringstream out;
  out << "param,value,throughput_total";
  for (int i = 0; i < n_users; ++i) out << ",throughput_" << i + 1;
  for (int i = 0; i < n_users; ++i) out << ",p_e_" << i + 1;
  for (int i = 0; i < n_users; ++i) out << ",stable_" << i + 1;
  out << '\n';
  for (const auto& row : rows) {
    out << param << ',';
    csv_number(out, row.value);
    out << ',';
    csv_number(out, row.metrics.throughput_total);
    for (int i = 0; i < n_users; ++i) {
      out << ',';
      csv_number(out, row.metrics.throughput_per_user[i]);
    }
    for (int i = 0; i < n_users; ++i) {
      out << ',';
      csv_number(out, row.metrics.empty_prob_per_user[i]);
    }
    for (int i = 0; i < n_users; ++i) {
      if (row.metrics.stable_verdict.has_value()) {
        out << ',' << ((*row.metrics.stable_verdict)[i] ? 1 : 0);
      } else {
        out << ",";
      }
    }
    out << '\n';
  }
  return out.str();
}

Json sweep_json(const std::string& param, const std::vector<SweepRow>& rows) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "sweep";
  j["param"] = param;
  Json points = Json::array();
  for (const auto& row : rows) {
    Json p;
    p["value"] = row.value;
    p["metrics"] = sim_metrics_json(row.metrics);
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + p.parent_path().string());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace secaloha
