#pragma once

#include <array>
#include <string>
#include <vector>

namespace secaloha {

/**
 * Finite-user slotted random access system. arrival[i] is the packet arrival
 * probability per slot, tx_prob[i] the transmission probability, fail_prob[i]
 * the fading outage probability of a collision-free transmission, and rho[i]
 * the secrecy-to-rate ratio of user i.
 */
struct SystemParams {
  int n_users = 2;
  std::vector<double> arrival;
  std::vector<double> tx_prob;
  std::vector<double> fail_prob;
  std::vector<double> rho;
};

/// Throws DomainError on out-of-range entries (including normalized arrival
/// rates above 1).
void validate(const SystemParams& params);

/// Outage-normalized arrival rates: arrival[i] / (1 - fail_prob[i]).
std::vector<double> arrival_norm(const SystemParams& params);

/// Per-user packet success probability when every queue is kept busy:
/// (1 - fail_prob[i]) * tx_prob[i] * prod_{j != i} (1 - tx_prob[j]).
std::vector<double> dominant_success_prob(const SystemParams& params);

/// Verdict of one condition family evaluated per user. margin > 0 means the
/// condition holds with slack; for non-strict conditions margin == 0 still
/// passes, for strict ones it does not.
struct ConditionVerdict {
  std::vector<bool> ok;
  std::vector<double> margin;

  bool all() const {
    for (bool b : ok)
      if (!b) return false;
    return true;
  }
};

/// Queue stability with every competitor kept busy (strict):
/// arrival_norm[i] < tx_prob[i] * prod_{j != i} (1 - tx_prob[j]).
ConditionVerdict is_stable_dominant(const SystemParams& params);

/// Secrecy constraint with every competitor kept busy (non-strict):
/// tx_prob[i] * prod_{j != i} (1 - tx_prob[j]) <= rho[i].
ConditionVerdict is_secure_dominant(const SystemParams& params);

/**
 * Whether any transmission vector stabilizes all queues. For N = 2 this is
 * the closed form sqrt(l1) + sqrt(l2) < 1; larger systems use the numeric
 * existence test below.
 */
bool stability_region_nonempty(const std::vector<double>& arrival_norm);

/**
 * Numeric existence test for any N: true iff some x in (0, 1] makes
 * x^(N-1) - prod_i (x + l_i) positive. The objective is log-transformed and
 * maximized by coarse scan plus golden-section refinement (it is unimodal in
 * the log domain).
 */
bool stability_region_nonempty_numeric(const std::vector<double>& arrival_norm);

/// Secrecy and stability jointly satisfiable: arrival_norm[i] < rho[i] for
/// every user and the stability region is nonempty.
bool joint_region_nonempty(const std::vector<double>& arrival_norm,
                           const std::vector<double>& rho);

enum class CaseLabel { Case1, Case2, Case3, Mixed, NotApplicable };
std::string to_string(CaseLabel label);

/**
 * Two-user optimizer case split. Case1: sqrt(r1)+sqrt(r2) <= 1. Case2: both
 * cross conditions sqrt(r1)+sqrt(l2) < 1 and sqrt(r2)+sqrt(l1) < 1. Case3:
 * both cross conditions reversed (> 1). Anything else is Mixed. Returns
 * NotApplicable when N != 2 or the joint region is empty.
 */
CaseLabel classify_case(const std::vector<double>& arrival_norm,
                        const std::vector<double>& rho);

struct EmptyProbs {
  std::vector<double> p_e;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

/**
 * Stationary empty-queue probabilities of the coupled system, solved by
 * damped fixed-point iteration (step 0.5) from p_e = 0 with iterates clamped
 * to [0, 1]. p_e[i] solves 1 - arrival[i] / mu_i(p_e) with
 * mu_i = (1-fail_prob[i]) tx_prob[i] prod_{j != i} [(1-p_e[j])(1-tx_prob[j]) + p_e[j]].
 * Non-convergence is reported through the flag, never thrown.
 */
EmptyProbs solve_empty_probs(const SystemParams& params, double tolerance = 1e-10,
                             int max_iter = 100000);

/// Secrecy constraint with idle competitors accounted for (non-strict):
/// tx_prob[i] * prod_{j != i} [(1-p_e[j])(1-tx_prob[j]) + p_e[j]] <= rho[i].
ConditionVerdict original_secrecy_ok(const SystemParams& params,
                                     const std::vector<double>& p_e);

/// Stability counterpart (strict): the same product must exceed arrival_norm[i].
ConditionVerdict original_stability_ok(const SystemParams& params,
                                       const std::vector<double>& p_e);

struct SecrecyThresholds {
  double q1_star = 0.0;       // largest q1 keeping user 1's constraint solvable
  double q2_star_star = 0.0;  // companion q2 at that corner
  double q2_star = 0.0;       // same pair with user roles swapped
  double q1_star_star = 0.0;
};

/**
 * Closed-form corner points of the two-user secrecy region with idle
 * competitors. q1_star is the smaller root of
 * l1*q^2 + r1*(l2 - 1 - l1)*q + r1^2 = 0 (solved in the cancellation-free
 * form) and q2_star_star = l2*r1 / (r1 - q1_star*l1); the second pair swaps
 * user roles. Throws NoRealRoot when the discriminant is negative.
 */
SecrecyThresholds original_secrecy_thresholds_n2(
    const std::vector<double>& arrival_norm, const std::vector<double>& rho);

/**
 * Empty-queue probability of user 2 implied by driving user 1's constraint to
 * its bound at (q1, q2). Zero at (q1_star, q2_star_star) by construction.
 */
double threshold_chain_p_e2(double q1, double q2,
                            const std::vector<double>& arrival_norm, double rho1);

enum class BoundaryKind {
  StabilityDominant,
  SecrecyDominant,
  StabilityOriginal,
  SecrecyOriginal,
};
std::string to_string(BoundaryKind kind);

struct BoundaryPolyline {
  BoundaryKind kind;
  int user = 0;  // which user's condition this curve bounds
  std::vector<std::array<double, 2>> points;  // (q1, q2), inside [0,1]^2
};

/**
 * Region boundaries over the (q1, q2) square. Dominant kinds come from the
 * closed-form curves q2 = 1 - bound1/q1 and q2 = bound2/(1 - q1); original
 * kinds evaluate the coupled-queue margins on a grid_points^2 lattice (with
 * solve_empty_probs at every node) and linearly interpolate the sign change
 * along each grid column. Points outside the unit square are dropped.
 */
std::vector<BoundaryPolyline> trace_boundaries_n2(const SystemParams& params,
                                                  BoundaryKind kind,
                                                  int grid_points);

}  // namespace secaloha
