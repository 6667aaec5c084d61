#include "secaloha/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "secaloha/errors.hpp"

namespace secaloha {
namespace {

constexpr double kActiveTol = 1e-9;
constexpr double kFeasTol = 1e-12;
constexpr double kInteriorShift = 1e-6;

struct Objective {
  double f1, f2;  // 1 - fail_prob
  double operator()(double q1, double q2) const {
    return q1 * (1.0 - q2) * f1 + q2 * (1.0 - q1) * f2;
  }
};

// Total order used everywhere a best point is selected: higher throughput
// wins, ties go to the lexicographically smallest q.
bool better(double s_a, const std::array<double, 2>& q_a, double s_b,
            const std::array<double, 2>& q_b) {
  if (s_a != s_b) return s_a > s_b;
  if (q_a[0] != q_b[0]) return q_a[0] < q_b[0];
  return q_a[1] < q_b[1];
}

struct Constraints {
  double l1, l2, r1, r2;

  double secrecy_margin1(double q1, double q2) const { return r1 - q1 * (1.0 - q2); }
  double secrecy_margin2(double q1, double q2) const { return r2 - q2 * (1.0 - q1); }
  double stability_margin1(double q1, double q2) const { return q1 * (1.0 - q2) - l1; }
  double stability_margin2(double q1, double q2) const { return q2 * (1.0 - q1) - l2; }

  bool strictly_feasible(double q1, double q2) const {
    return secrecy_margin1(q1, q2) >= 0.0 && secrecy_margin2(q1, q2) >= 0.0 &&
           stability_margin1(q1, q2) > 0.0 && stability_margin2(q1, q2) > 0.0;
  }

  // Candidate admission: secrecy non-strict, stability allowed to sit on the
  // boundary (the open-boundary supremum case).
  bool admissible(double q1, double q2) const {
    if (!(q1 >= 0.0 && q1 <= 1.0 && q2 >= 0.0 && q2 <= 1.0)) return false;
    return secrecy_margin1(q1, q2) >= -kFeasTol &&
           secrecy_margin2(q1, q2) >= -kFeasTol &&
           stability_margin1(q1, q2) >= -kFeasTol &&
           stability_margin2(q1, q2) >= -kFeasTol;
  }
};

std::vector<Constraint> active_set(const Constraints& c, double q1, double q2,
                                   double tol) {
  std::vector<Constraint> act;
  if (std::abs(c.secrecy_margin1(q1, q2)) <= tol) act.push_back(Constraint::Secrecy1);
  if (std::abs(c.secrecy_margin2(q1, q2)) <= tol) act.push_back(Constraint::Secrecy2);
  if (std::abs(c.stability_margin1(q1, q2)) <= tol)
    act.push_back(Constraint::Stability1);
  if (std::abs(c.stability_margin2(q1, q2)) <= tol)
    act.push_back(Constraint::Stability2);
  return act;
}

// Both roots of q^2 - (1 + r1 - r2) q + r1 = 0, solved in the
// cancellation-free form and polished with one Newton step.
std::array<double, 2> corner_roots(double r1, double r2) {
  const double b = -(1.0 + r1 - r2);
  const double c = r1;
  const double disc = std::max(b * b - 4.0 * c, 0.0);
  const double s = std::sqrt(disc);
  double hi = (-b + s) / 2.0;
  double lo = hi > 0.0 ? c / hi : 0.0;
  auto polish = [&](double q) {
    const double deriv = 2.0 * q + b;
    if (deriv != 0.0) q -= (q * q + b * q + c) / deriv;
    return q;
  };
  return {polish(lo), polish(hi)};
}

}  // namespace

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::Secrecy1: return "secrecy1";
    case Constraint::Secrecy2: return "secrecy2";
    case Constraint::Stability1: return "stability1";
    case Constraint::Stability2: return "stability2";
  }
  return "secrecy1";
}

double throughput_dominant(const SystemParams& p) {
  validate(p);
  if (p.n_users != 2)
    throw DimensionError("throughput objective is defined for exactly 2 users");
  return Objective{1.0 - p.fail_prob[0], 1.0 - p.fail_prob[1]}(p.tx_prob[0],
                                                               p.tx_prob[1]);
}

OptimResult optimize_dominant_n2(const SystemParams& p) {
  validate(p);
  if (p.n_users != 2)
    throw DimensionError("closed-form optimizer is defined for exactly 2 users");
  const auto lam = arrival_norm(p);
  if (!joint_region_nonempty(lam, p.rho))
    throw InfeasibleRegion("no transmission probabilities satisfy secrecy and stability");

  const Constraints cons{lam[0], lam[1], p.rho[0], p.rho[1]};
  const Objective obj{1.0 - p.fail_prob[0], 1.0 - p.fail_prob[1]};
  const CaseLabel label = classify_case(lam, p.rho);

  if (label == CaseLabel::Mixed) {
    OptimResult res = grid_search_oracle(p);
    res.case_label = CaseLabel::Mixed;
    return res;
  }

  OptimResult res;
  res.case_label = label;

  auto consider = [&](double q1, double q2) {
    Candidate cand;
    cand.q = {q1, q2};
    cand.throughput = obj(q1, q2);
    cand.feasible = cons.admissible(q1, q2);
    res.candidates_evaluated.push_back(cand);
  };

  switch (label) {
    case CaseLabel::Case1: {
      const auto roots = corner_roots(p.rho[0], p.rho[1]);
      for (double q1 : roots) {
        if (!(q1 > 0.0)) continue;
        consider(q1, 1.0 - p.rho[0] / q1);
      }
      break;
    }
    case CaseLabel::Case2: {
      const double s1 = std::sqrt(p.rho[0]);
      const double s2 = std::sqrt(p.rho[1]);
      if (s1 + std::sqrt(lam[1]) < 1.0) consider(s1, 1.0 - s1);
      if (s2 + std::sqrt(lam[0]) < 1.0) consider(1.0 - s2, s2);
      break;
    }
    case CaseLabel::Case3: {
      const double s1 = std::sqrt(lam[0]);
      const double s2 = std::sqrt(lam[1]);
      consider(s1, 1.0 - s1);
      consider(1.0 - s2, s2);
      res.is_supremum_on_open_boundary = true;
      break;
    }
    default:
      break;
  }

  bool found = false;
  for (const auto& cand : res.candidates_evaluated) {
    if (!cand.feasible) continue;
    if (!found || better(cand.throughput, cand.q, res.throughput, res.q_opt)) {
      res.q_opt = cand.q;
      res.throughput = cand.throughput;
      found = true;
    }
  }
  if (!found) {
    // Defensive: no closed-form candidate was admissible.
    OptimResult fallback = grid_search_oracle(p);
    fallback.case_label = label;
    return fallback;
  }

  res.active_constraints = active_set(cons, res.q_opt[0], res.q_opt[1], kActiveTol);

  if (res.is_supremum_on_open_boundary) {
    // Shift along the gradient of the tight stability constraint onto the
    // strictly feasible side.
    const double q1 = res.q_opt[0], q2 = res.q_opt[1];
    double g1, g2;
    if (std::abs(cons.stability_margin1(q1, q2)) <=
        std::abs(cons.stability_margin2(q1, q2))) {
      g1 = 1.0 - q2;  // gradient of q1(1-q2)
      g2 = -q1;
    } else {
      g1 = -q2;  // gradient of q2(1-q1)
      g2 = 1.0 - q1;
    }
    const double norm = std::hypot(g1, g2);
    if (norm > 0.0) {
      const double i1 = q1 + kInteriorShift * g1 / norm;
      const double i2 = q2 + kInteriorShift * g2 / norm;
      if (i1 >= 0.0 && i1 <= 1.0 && i2 >= 0.0 && i2 <= 1.0 &&
          cons.strictly_feasible(i1, i2))
        res.interior_point = std::array<double, 2>{i1, i2};
    }
  }
  return res;
}

OptimResult grid_search_oracle(const SystemParams& p, int resolution) {
  validate(p);
  if (p.n_users != 2)
    throw DimensionError("grid oracle is defined for exactly 2 users");
  if (resolution < 2) throw DomainError("resolution must be >= 2");
  const auto lam = arrival_norm(p);
  const Constraints cons{lam[0], lam[1], p.rho[0], p.rho[1]};
  const Objective obj{1.0 - p.fail_prob[0], 1.0 - p.fail_prob[1]};
  const double step = 1.0 / resolution;

  struct Best {
    bool found = false;
    double s = 0.0;
    std::array<double, 2> q{0.0, 0.0};
  };

  auto scan_rows = [&](int row_begin, int row_end) {
    Best best;
    for (int a = row_begin; a < row_end; ++a) {
      const double q1 = a * step;
      for (int b = 0; b <= resolution; ++b) {
        const double q2 = b * step;
        if (!cons.strictly_feasible(q1, q2)) continue;
        const double s = obj(q1, q2);
        if (!best.found || better(s, {q1, q2}, best.s, best.q)) {
          best.found = true;
          best.s = s;
          best.q = {q1, q2};
        }
      }
    }
    return best;
  };

  const int n_rows = resolution + 1;
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::clamp<int>(hw == 0 ? 1 : static_cast<int>(hw), 1, 16);
  std::vector<std::future<Best>> futs;
  futs.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int begin = static_cast<int>(static_cast<long long>(n_rows) * w / workers);
    const int end =
        static_cast<int>(static_cast<long long>(n_rows) * (w + 1) / workers);
    futs.push_back(std::async(std::launch::async, scan_rows, begin, end));
  }

  Best best;
  for (auto& f : futs) {
    const Best local = f.get();
    if (!local.found) continue;
    if (!best.found || better(local.s, local.q, best.s, best.q)) best = local;
  }
  if (!best.found)
    throw EmptyFeasibleSet("no grid point satisfies secrecy and stability");

  OptimResult res;
  res.q_opt = best.q;
  res.throughput = best.s;
  res.case_label = classify_case(lam, p.rho);
  res.active_constraints = active_set(cons, best.q[0], best.q[1], 2.0 * step);
  res.candidates_evaluated.push_back(Candidate{best.q, best.s, true});
  return res;
}

double original_throughput(const std::vector<double>& arrival) {
  double total = 0.0;
  for (double a : arrival) {
    if (!(a >= 0.0 && a <= 1.0))
      throw DomainError("arrival entries must lie in [0, 1]");
    total += a;
  }
  return total;
}

}  // namespace secaloha
