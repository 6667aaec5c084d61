#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "secaloha/regions.hpp"

namespace secaloha {

enum class Constraint { Secrecy1, Secrecy2, Stability1, Stability2 };
std::string to_string(Constraint c);

struct Candidate {
  std::array<double, 2> q{0.0, 0.0};
  double throughput = 0.0;
  bool feasible = false;
};

struct OptimResult {
  std::array<double, 2> q_opt{0.0, 0.0};
  double throughput = 0.0;
  CaseLabel case_label = CaseLabel::NotApplicable;
  std::vector<Constraint> active_constraints;
  // True when the optimum is a supremum on the open stability boundary and is
  // not attained; interior_point then holds a strictly feasible point shifted
  // 1e-6 along the tight constraint's gradient (when such a shift stays
  // feasible).
  bool is_supremum_on_open_boundary = false;
  std::optional<std::array<double, 2>> interior_point;
  std::vector<Candidate> candidates_evaluated;
};

/// Two-user sum throughput with every queue kept busy:
/// q1(1-q2)(1-f1) + q2(1-q1)(1-f2).
double throughput_dominant(const SystemParams& params);

/**
 * Closed-form throughput-optimal transmission probabilities for two users
 * under the busy-queue secrecy (non-strict) and stability (strict)
 * constraints. Case1 solves the corner quadratic
 * q1^2 - (1 + r1 - r2) q1 + r1 = 0 with q2 = 1 - r1/q1; Case2 evaluates
 * (sqrt(r1), 1-sqrt(r1)) and (1-sqrt(r2), sqrt(r2)), each admitted only when
 * its stability side condition holds; Case3 evaluates (sqrt(l1), 1-sqrt(l1))
 * and (1-sqrt(l2), sqrt(l2)) and flags the open-boundary supremum. Mixed
 * classifications fall back to the grid oracle. Ties break to the
 * lexicographically smallest q. Throws InfeasibleRegion when the joint region
 * is empty.
 */
OptimResult optimize_dominant_n2(const SystemParams& params);

/**
 * Exhaustive reference maximizer over a (resolution+1)^2 uniform lattice on
 * [0,1]^2. Rows are partitioned across parallel workers and reduced with a
 * deterministic total order (throughput descending, then lexicographic q), so
 * results do not depend on scheduling. Throws EmptyFeasibleSet when no grid
 * point is feasible.
 */
OptimResult grid_search_oracle(const SystemParams& params, int resolution = 2000);

/// Optimal sum throughput with idle queues accounted for: inside the joint
/// region every feasible q drains the queues, so the rate equals the total
/// arrival rate.
double original_throughput(const std::vector<double>& arrival);

}  // namespace secaloha
