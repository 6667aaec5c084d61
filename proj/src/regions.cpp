#include "secaloha/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secaloha/errors.hpp"

namespace secaloha {
namespace {

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw DomainError(std::string(name) + " entries must lie in [0, 1]");
}

double occupancy_dominant(const SystemParams& p, int i) {
  double prod = p.tx_prob[i];
  for (int j = 0; j < p.n_users; ++j) {
    if (j != i) prod *= 1.0 - p.tx_prob[j];
  }
  return prod;
}

double occupancy_original(const SystemParams& p, const std::vector<double>& p_e,
                          int i) {
  double prod = p.tx_prob[i];
  for (int j = 0; j < p.n_users; ++j) {
    if (j == i) continue;
    prod *= (1.0 - p_e[j]) * (1.0 - p.tx_prob[j]) + p_e[j];
  }
  return prod;
}

void check_arrival_norm(const std::vector<double>& lam) {
  if (lam.size() < 2) throw DomainError("need at least 2 users");
  for (double l : lam)
    if (!(l >= 0.0 && l <= 1.0))
      throw DomainError("normalized arrival rates must lie in [0, 1]");
}

// Log-domain objective for the stability existence test:
// (N-1)*ln(x) - sum_i ln(x + l_i). Positive iff the polynomial form is.
double log_gap(double x, const std::vector<double>& lam) {
  double v = (static_cast<double>(lam.size()) - 1.0) * std::log(x);
  for (double l : lam) v -= std::log(x + l);
  return v;
}

}  // namespace

void validate(const SystemParams& p) {
  if (p.n_users < 2) throw DomainError("system needs at least 2 users");
  const auto n = static_cast<std::size_t>(p.n_users);
  if (p.arrival.size() != n || p.tx_prob.size() != n || p.fail_prob.size() != n ||
      p.rho.size() != n)
    throw DomainError("arrival, tx_prob, fail_prob and rho must have n_users entries");
  for (double v : p.arrival) check_probability(v, "arrival");
  for (double v : p.tx_prob) check_probability(v, "tx_prob");
  for (double v : p.rho) check_probability(v, "rho");
  for (double v : p.fail_prob)
    if (!(v >= 0.0 && v < 1.0))
      throw DomainError("fail_prob entries must lie in [0, 1)");
  for (std::size_t i = 0; i < n; ++i)
    if (p.arrival[i] / (1.0 - p.fail_prob[i]) > 1.0)
      throw DomainError("normalized arrival rate exceeds 1 for user " +
                        std::to_string(i));
}

std::vector<double> arrival_norm(const SystemParams& p) {
  validate(p);
  std::vector<double> lam(p.n_users);
  for (int i = 0; i < p.n_users; ++i)
    lam[i] = p.arrival[i] / (1.0 - p.fail_prob[i]);
  return lam;
}

std::vector<double> dominant_success_prob(const SystemParams& p) {
  validate(p);
  std::vector<double> out(p.n_users);
  for (int i = 0; i < p.n_users; ++i)
    out[i] = (1.0 - p.fail_prob[i]) * occupancy_dominant(p, i);
  return out;
}

ConditionVerdict is_stable_dominant(const SystemParams& p) {
  const auto lam = arrival_norm(p);
  ConditionVerdict v;
  v.ok.resize(p.n_users);
  v.margin.resize(p.n_users);
  for (int i = 0; i < p.n_users; ++i) {
    v.margin[i] = occupancy_dominant(p, i) - lam[i];
    v.ok[i] = v.margin[i] > 0.0;
  }
  return v;
}

ConditionVerdict is_secure_dominant(const SystemParams& p) {
  validate(p);
  ConditionVerdict v;
  v.ok.resize(p.n_users);
  v.margin.resize(p.n_users);
  for (int i = 0; i < p.n_users; ++i) {
    v.margin[i] = p.rho[i] - occupancy_dominant(p, i);
    v.ok[i] = v.margin[i] >= 0.0;
  }
  return v;
}

bool stability_region_nonempty(const std::vector<double>& lam) {
  check_arrival_norm(lam);
  if (lam.size() == 2) return std::sqrt(lam[0]) + std::sqrt(lam[1]) < 1.0;
  return stability_region_nonempty_numeric(lam);
}

bool stability_region_nonempty_numeric(const std::vector<double>& lam) {
  check_arrival_norm(lam);
  bool all_zero = true;
  for (double l : lam) all_zero = all_zero && l == 0.0;
  if (all_zero) return true;  // any x in (0, 1) works

  // Coarse scan over (0, 1]: log-spaced points catch spikes near 0 (when all
  // but one rate vanish), linear points cover the interior.
  double best_x = 1.0;
  double best_v = -std::numeric_limits<double>::infinity();
  auto consider = [&](double x) {
    const double v = log_gap(x, lam);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  };
  for (int k = 0; k <= 40; ++k) consider(std::pow(10.0, -9.0 + 9.0 * k / 40.0));
  for (int k = 1; k <= 64; ++k) consider(static_cast<double>(k) / 64.0);
  if (best_v > 0.0) return true;

  // Golden-section refinement around the scan winner.
  double lo = std::max(best_x * 0.1, 1e-12);
  double hi = std::min(best_x * 10.0, 1.0);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = log_gap(c, lam), fd = log_gap(d, lam);
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = log_gap(c, lam);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = log_gap(d, lam);
    }
  }
  return std::max(fc, fd) > 0.0;
}

bool joint_region_nonempty(const std::vector<double>& lam,
                           const std::vector<double>& rho) {
  check_arrival_norm(lam);
  if (rho.size() != lam.size())
    throw DomainError("arrival_norm and rho must have the same size");
  for (std::size_t i = 0; i < lam.size(); ++i)
    if (!(lam[i] < rho[i])) return false;
  return stability_region_nonempty(lam);
}

std::string to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::Case1: return "Case1";
    case CaseLabel::Case2: return "Case2";
    case CaseLabel::Case3: return "Case3";
    case CaseLabel::Mixed: return "Mixed";
    case CaseLabel::NotApplicable: return "NotApplicable";
  }
  return "NotApplicable";
}

CaseLabel classify_case(const std::vector<double>& lam,
                        const std::vector<double>& rho) {
  if (lam.size() != 2 || rho.size() != 2) return CaseLabel::NotApplicable;
  if (!joint_region_nonempty(lam, rho)) return CaseLabel::NotApplicable;
  const double sr1 = std::sqrt(rho[0]), sr2 = std::sqrt(rho[1]);
  const double sl1 = std::sqrt(lam[0]), sl2 = std::sqrt(lam[1]);
  if (sr1 + sr2 <= 1.0) return CaseLabel::Case1;
  if (sr1 + sl2 < 1.0 && sr2 + sl1 < 1.0) return CaseLabel::Case2;
  if (sr1 + sl2 > 1.0 && sr2 + sl1 > 1.0) return CaseLabel::Case3;
  return CaseLabel::Mixed;
}

EmptyProbs solve_empty_probs(const SystemParams& p, double tolerance,
                             int max_iter) {
  validate(p);
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be > 0");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  const int n = p.n_users;

  std::vector<double> pe(n, 0.0), target(n, 0.0);
  auto eval_target = [&](const std::vector<double>& cur) {
    for (int i = 0; i < n; ++i) {
      if (p.arrival[i] == 0.0) {
        target[i] = 1.0;
        continue;
      }
      const double mu = (1.0 - p.fail_prob[i]) * occupancy_original(p, cur, i);
      target[i] = mu > 0.0 ? std::clamp(1.0 - p.arrival[i] / mu, 0.0, 1.0) : 0.0;
    }
  };

  EmptyProbs out;
  out.residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    eval_target(pe);
    double res = 0.0;
    for (int i = 0; i < n; ++i) res = std::max(res, std::abs(target[i] - pe[i]));
    for (int i = 0; i < n; ++i) {
      // A user with no arrivals has the constant target 1; damping would only
      // chase it geometrically, so land on it directly.
      pe[i] = p.arrival[i] == 0.0 ? 1.0 : 0.5 * pe[i] + 0.5 * target[i];
    }
    out.iterations = it;
    out.residual = res;
    if (res < tolerance) {
      out.converged = true;
      break;
    }
  }
  out.p_e = pe;
  return out;
}

ConditionVerdict original_secrecy_ok(const SystemParams& p,
                                     const std::vector<double>& p_e) {
  validate(p);
  if (p_e.size() != static_cast<std::size_t>(p.n_users))
    throw DomainError("p_e must have n_users entries");
  ConditionVerdict v;
  v.ok.resize(p.n_users);
  v.margin.resize(p.n_users);
  for (int i = 0; i < p.n_users; ++i) {
    v.margin[i] = p.rho[i] - occupancy_original(p, p_e, i);
    v.ok[i] = v.margin[i] >= 0.0;
  }
  return v;
}

ConditionVerdict original_stability_ok(const SystemParams& p,
                                       const std::vector<double>& p_e) {
  const auto lam = arrival_norm(p);
  if (p_e.size() != static_cast<std::size_t>(p.n_users))
    throw DomainError("p_e must have n_users entries");
  ConditionVerdict v;
  v.ok.resize(p.n_users);
  v.margin.resize(p.n_users);
  for (int i = 0; i < p.n_users; ++i) {
    v.margin[i] = occupancy_original(p, p_e, i) - lam[i];
    v.ok[i] = v.margin[i] > 0.0;
  }
  return v;
}

SecrecyThresholds original_secrecy_thresholds_n2(
    const std::vector<double>& lam, const std::vector<double>& rho) {
  if (lam.size() != 2 || rho.size() != 2)
    throw DimensionError("thresholds are defined for exactly 2 users");
  check_arrival_norm(lam);
  for (double l : lam)
    if (!(l > 0.0)) throw DomainError("normalized arrival rates must be > 0");
  for (double r : rho)
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("rho entries must lie in (0, 1]");

  // Smaller root of a*q^2 + b*q + c with a > 0, b < 0, c > 0, taken in the
  // form 2c / (-b + sqrt(disc)) to avoid cancellation.
  auto corner = [](double l_self, double l_other, double r_self,
                   double& q_self, double& q_other) {
    const double a = l_self;
    const double b = r_self * (l_other - 1.0 - l_self);
    const double c = r_self * r_self;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0)
      throw NoRealRoot("threshold quadratic has no real root");
    q_self = 2.0 * c / (-b + std::sqrt(disc));
    const double denom = r_self - q_self * l_self;
    if (!(denom > 0.0))
      throw DomainError("threshold companion point is undefined");
    q_other = l_other * r_self / denom;
  };

  SecrecyThresholds t;
  corner(lam[0], lam[1], rho[0], t.q1_star, t.q2_star_star);
  corner(lam[1], lam[0], rho[1], t.q2_star, t.q1_star_star);
  return t;
}

double threshold_chain_p_e2(double q1, double q2,
                            const std::vector<double>& lam, double rho1) {
  if (lam.size() != 2)
    throw DimensionError("threshold chain is defined for exactly 2 users");
  const double ratio = lam[0] / rho1;
  const double denom = q2 * (ratio * (1.0 - q1) + 1.0 - ratio);
  return 1.0 - lam[1] / denom;
}

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::StabilityDominant: return "stability-dominant";
    case BoundaryKind::SecrecyDominant: return "secrecy-dominant";
    case BoundaryKind::StabilityOriginal: return "stability-original";
    case BoundaryKind::SecrecyOriginal: return "secrecy-original";
  }
  return "stability-dominant";
}

std::vector<BoundaryPolyline> trace_boundaries_n2(const SystemParams& params,
                                                  BoundaryKind kind,
                                                  int grid_points) {
  validate(params);
  if (params.n_users != 2)
    throw DimensionError("boundary tracing is defined for exactly 2 users");
  if (grid_points < 2) throw DomainError("grid_points must be >= 2");
  const auto lam = arrival_norm(params);

  std::vector<BoundaryPolyline> out;
  const double step = 1.0 / (grid_points - 1);

  if (kind == BoundaryKind::StabilityDominant ||
      kind == BoundaryKind::SecrecyDominant) {
    const bool stability = kind == BoundaryKind::StabilityDominant;
    const double bound1 = stability ? lam[0] : params.rho[0];
    const double bound2 = stability ? lam[1] : params.rho[1];

    BoundaryPolyline c1{kind, 1, {}};
    for (int k = 0; k < grid_points; ++k) {
      const double q1 = k * step;
      if (q1 <= 0.0) continue;  // q2 = 1 - bound1/q1 leaves the square
      const double q2 = 1.0 - bound1 / q1;
      if (q2 >= 0.0 && q2 <= 1.0) c1.points.push_back({q1, q2});
    }
    BoundaryPolyline c2{kind, 2, {}};
    for (int k = 0; k < grid_points; ++k) {
      const double q1 = k * step;
      if (q1 >= 1.0) continue;
      const double q2 = bound2 / (1.0 - q1);
      if (q2 >= 0.0 && q2 <= 1.0) c2.points.push_back({q1, q2});
    }
    if (!c1.points.empty()) out.push_back(std::move(c1));
    if (!c2.points.empty()) out.push_back(std::move(c2));
    return out;
  }

  // Original-system kinds: evaluate margins on the lattice with the coupled
  // empty-queue probabilities solved at every node, then interpolate the sign
  // change along each column of constant q1.
  const bool stability = kind == BoundaryKind::StabilityOriginal;
  std::vector<std::vector<std::array<double, 2>>> margins(
      grid_points, std::vector<std::array<double, 2>>(grid_points));
  SystemParams node = params;
  for (int a = 0; a < grid_points; ++a) {
    node.tx_prob[0] = a * step;
    for (int b = 0; b < grid_points; ++b) {
      node.tx_prob[1] = b * step;
      const auto pe = solve_empty_probs(node);
      const auto verdict = stability ? original_stability_ok(node, pe.p_e)
                                     : original_secrecy_ok(node, pe.p_e);
      margins[a][b] = {verdict.margin[0], verdict.margin[1]};
    }
  }

  for (int user = 0; user < 2; ++user) {
    BoundaryPolyline poly{kind, user + 1, {}};
    for (int a = 0; a < grid_points; ++a) {
      const double q1 = a * step;
      for (int b = 0; b + 1 < grid_points; ++b) {
        const double m0 = margins[a][b][user];
        const double m1 = margins[a][b + 1][user];
        if (m0 == 0.0) {
          poly.points.push_back({q1, b * step});
          continue;
        }
        if ((m0 < 0.0) == (m1 < 0.0)) continue;
        const double frac = m0 / (m0 - m1);
        poly.points.push_back({q1, (b + frac) * step});
      }
    }
    if (!poly.points.empty()) out.push_back(std::move(poly));
  }
  return out;
}

}  // namespace secaloha
