#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "secaloha/channel.hpp"
#include "secaloha/errors.hpp"
#include "secaloha/optimizer.hpp"
#include "secaloha/regions.hpp"
#include "secaloha/simulator.hpp"

namespace py = pybind11;
using namespace secaloha;

PYBIND11_MODULE(secaloha, m) {
  m.doc() = "secrecy-stability analysis for slotted random access";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ZeroConditioningHits>(m, "ZeroConditioningHitsError",
                                               PyExc_ValueError);
  py::register_exception<DegenerateCapacity>(m, "DegenerateCapacityError",
                                             PyExc_ValueError);
  py::register_exception<NoRealRoot>(m, "NoRealRootError", PyExc_ValueError);
  py::register_exception<InsufficientData>(m, "InsufficientDataError",
                                           PyExc_ValueError);
  py::register_exception<InfeasibleRegion>(m, "InfeasibleRegionError",
                                           PyExc_RuntimeError);
  py::register_exception<EmptyFeasibleSet>(m, "EmptyFeasibleSetError",
                                           PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init([](int n_users, double power, std::vector<double> base,
                       std::vector<double> cross) {
             ChannelParams p{n_users, power, std::move(base), std::move(cross)};
             validate(p);
             return p;
           }),
           py::arg("n_users"), py::arg("power"), py::arg("mean_gain_base"),
           py::arg("mean_gain_cross"))
      .def_readonly("n_users", &ChannelParams::n_users)
      .def_readonly("power", &ChannelParams::power)
      .def_readonly("mean_gain_base", &ChannelParams::mean_gain_base)
      .def_readonly("mean_gain_cross", &ChannelParams::mean_gain_cross);

  py::class_<ChannelState>(m, "ChannelState")
      .def_readonly("gain_base", &ChannelState::gain_base)
      .def_readonly("gain_cross", &ChannelState::gain_cross);

  py::class_<CapacityEstimate>(m, "CapacityEstimate")
      .def_readonly("value", &CapacityEstimate::value)
      .def_readonly("std_error", &CapacityEstimate::std_error)
      .def_readonly("n_samples", &CapacityEstimate::n_samples)
      .def_readonly("n_conditioning_hits", &CapacityEstimate::n_conditioning_hits)
      .def_readonly("floored_at_zero", &CapacityEstimate::floored_at_zero)
      .def("__repr__", [](const CapacityEstimate& e) {
        return "CapacityEstimate(value=" + std::to_string(e.value) +
               ", std_error=" + std::to_string(e.std_error) + ")";
      });

  py::enum_<SecrecyAveraging>(m, "SecrecyAveraging")
      .value("RawDifference", SecrecyAveraging::RawDifference)
      .value("PositivePart", SecrecyAveraging::PositivePart);

  py::class_<RhoResult>(m, "RhoResult")
      .def_readonly("rho", &RhoResult::rho)
      .def_readonly("clamped", &RhoResult::clamped)
      .def_readonly("clamp_events", &RhoResult::clamp_events)
      .def_readonly("secrecy", &RhoResult::secrecy)
      .def_readonly("ergodic", &RhoResult::ergodic);

  m.def("sample_channel_state",
        py::overload_cast<const ChannelParams&, std::uint64_t>(
            &sample_channel_state),
        py::arg("params"), py::arg("seed"));
  m.def("estimate_secrecy_capacity", &estimate_secrecy_capacity, py::arg("user"),
        py::arg("params"), py::arg("n_samples"), py::arg("seed"),
        py::arg("mode") = SecrecyAveraging::RawDifference);
  m.def("estimate_ergodic_capacity", &estimate_ergodic_capacity, py::arg("user"),
        py::arg("params"), py::arg("n_samples"), py::arg("seed"));
  m.def("estimate_conditional_capacity", &estimate_conditional_capacity,
        py::arg("user"), py::arg("params"), py::arg("n_samples"), py::arg("seed"));
  m.def("compute_rho", &compute_rho, py::arg("params"), py::arg("n_samples"),
        py::arg("seed"), py::arg("mode") = SecrecyAveraging::RawDifference);
  m.def("outage_failure_prob", &outage_failure_prob, py::arg("target_rate"),
        py::arg("power"), py::arg("mean_gain"));

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](int n_users, std::vector<double> arrival,
                       std::vector<double> tx_prob, std::vector<double> fail_prob,
                       std::vector<double> rho) {
             SystemParams p{n_users, std::move(arrival), std::move(tx_prob),
                            std::move(fail_prob), std::move(rho)};
             validate(p);
             return p;
           }),
           py::arg("n_users"), py::arg("arrival"), py::arg("tx_prob"),
           py::arg("fail_prob"), py::arg("rho"))
      .def_readonly("n_users", &SystemParams::n_users)
      .def_readonly("arrival", &SystemParams::arrival)
      .def_readonly("tx_prob", &SystemParams::tx_prob)
      .def_readonly("fail_prob", &SystemParams::fail_prob)
      .def_readonly("rho", &SystemParams::rho);

  py::class_<ConditionVerdict>(m, "ConditionVerdict")
      .def_readonly("ok", &ConditionVerdict::ok)
      .def_readonly("margin", &ConditionVerdict::margin)
      .def("all", &ConditionVerdict::all);

  py::enum_<CaseLabel>(m, "CaseLabel")
      .value("Case1", CaseLabel::Case1)
      .value("Case2", CaseLabel::Case2)
      .value("Case3", CaseLabel::Case3)
      .value("Mixed", CaseLabel::Mixed)
      .value("NotApplicable", CaseLabel::NotApplicable);

  py::class_<EmptyProbs>(m, "EmptyProbs")
      .def_readonly("p_e", &EmptyProbs::p_e)
      .def_readonly("converged", &EmptyProbs::converged)
      .def_readonly("iterations", &EmptyProbs::iterations)
      .def_readonly("residual", &EmptyProbs::residual);

  py::class_<SecrecyThresholds>(m, "SecrecyThresholds")
      .def_readonly("q1_star", &SecrecyThresholds::q1_star)
      .def_readonly("q2_star_star", &SecrecyThresholds::q2_star_star)
      .def_readonly("q2_star", &SecrecyThresholds::q2_star)
      .def_readonly("q1_star_star", &SecrecyThresholds::q1_star_star);

  m.def("arrival_norm", &arrival_norm, py::arg("params"));
  m.def("dominant_success_prob", &dominant_success_prob, py::arg("params"));
  m.def("is_stable_dominant", &is_stable_dominant, py::arg("params"));
  m.def("is_secure_dominant", &is_secure_dominant, py::arg("params"));
  m.def("stability_region_nonempty", &stability_region_nonempty,
        py::arg("arrival_norm"));
  m.def("stability_region_nonempty_numeric", &stability_region_nonempty_numeric,
        py::arg("arrival_norm"));
  m.def("joint_region_nonempty", &joint_region_nonempty, py::arg("arrival_norm"),
        py::arg("rho"));
  m.def("classify_case", &classify_case, py::arg("arrival_norm"), py::arg("rho"));
  m.def("solve_empty_probs", &solve_empty_probs, py::arg("params"),
        py::arg("tolerance") = 1e-10, py::arg("max_iter") = 100000);
  m.def("original_secrecy_ok", &original_secrecy_ok, py::arg("params"),
        py::arg("p_e"));
  m.def("original_stability_ok", &original_stability_ok, py::arg("params"),
        py::arg("p_e"));
  m.def("original_secrecy_thresholds_n2", &original_secrecy_thresholds_n2,
        py::arg("arrival_norm"), py::arg("rho"));
  m.def("threshold_chain_p_e2", &threshold_chain_p_e2, py::arg("q1"),
        py::arg("q2"), py::arg("arrival_norm"), py::arg("rho1"));

  py::enum_<Constraint>(m, "Constraint")
      .value("Secrecy1", Constraint::Secrecy1)
      .value("Secrecy2", Constraint::Secrecy2)
      .value("Stability1", Constraint::Stability1)
      .value("Stability2", Constraint::Stability2);

  py::class_<Candidate>(m, "Candidate")
      .def_readonly("q", &Candidate::q)
      .def_readonly("throughput", &Candidate::throughput)
      .def_readonly("feasible", &Candidate::feasible);

  py::class_<OptimResult>(m, "OptimResult")
      .def_readonly("q_opt", &OptimResult::q_opt)
      .def_readonly("throughput", &OptimResult::throughput)
      .def_readonly("case_label", &OptimResult::case_label)
      .def_readonly("active_constraints", &OptimResult::active_constraints)
      .def_readonly("is_supremum_on_open_boundary",
                    &OptimResult::is_supremum_on_open_boundary)
      .def_readonly("interior_point", &OptimResult::interior_point)
      .def_readonly("candidates_evaluated", &OptimResult::candidates_evaluated);

  m.def("throughput_dominant", &throughput_dominant, py::arg("params"));
  m.def("optimize_dominant_n2", &optimize_dominant_n2, py::arg("params"));
  m.def("grid_search_oracle", &grid_search_oracle, py::arg("params"),
        py::arg("resolution") = 2000);
  m.def("original_throughput", &original_throughput, py::arg("arrival"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init([](SystemParams params, std::uint64_t n_slots,
                       std::uint64_t warmup_slots, std::uint64_t seed,
                       bool dominant_mode, int replications,
                       double drift_threshold) {
             SimConfig c{std::move(params), n_slots,      warmup_slots, seed,
                         dominant_mode,     replications, drift_threshold};
             validate(c);
             return c;
           }),
           py::arg("params"), py::arg("n_slots"), py::arg("warmup_slots") = 0,
           py::arg("seed") = 0, py::arg("dominant_mode") = false,
           py::arg("replications") = 1, py::arg("drift_threshold") = 0.01)
      .def_readonly("params", &SimConfig::params)
      .def_readonly("n_slots", &SimConfig::n_slots)
      .def_readonly("warmup_slots", &SimConfig::warmup_slots)
      .def_readonly("seed", &SimConfig::seed)
      .def_readonly("dominant_mode", &SimConfig::dominant_mode)
      .def_readonly("replications", &SimConfig::replications)
      .def_readonly("drift_threshold", &SimConfig::drift_threshold);

  py::class_<SimMetricsCi>(m, "SimMetricsCi")
      .def_readonly("throughput", &SimMetricsCi::throughput)
      .def_readonly("empty_prob", &SimMetricsCi::empty_prob)
      .def_readonly("clean_tx", &SimMetricsCi::clean_tx)
      .def_readonly("mean_queue", &SimMetricsCi::mean_queue)
      .def_readonly("collision", &SimMetricsCi::collision)
      .def_readonly("throughput_total", &SimMetricsCi::throughput_total);

  py::class_<SimMetrics>(m, "SimMetrics")
      .def_readonly("throughput_per_user", &SimMetrics::throughput_per_user)
      .def_readonly("throughput_total", &SimMetrics::throughput_total)
      .def_readonly("empty_prob_per_user", &SimMetrics::empty_prob_per_user)
      .def_readonly("clean_tx_fraction_per_user",
                    &SimMetrics::clean_tx_fraction_per_user)
      .def_readonly("collision_fraction", &SimMetrics::collision_fraction)
      .def_readonly("mean_queue", &SimMetrics::mean_queue)
      .def_readonly("queue_drift", &SimMetrics::queue_drift)
      .def_readonly("stable_verdict", &SimMetrics::stable_verdict)
      .def_readonly("ci", &SimMetrics::ci)
      .def_readonly("total_arrivals", &SimMetrics::total_arrivals)
      .def_readonly("total_departures", &SimMetrics::total_departures)
      .def_readonly("final_queue_total", &SimMetrics::final_queue_total)
      .def_readonly("replications", &SimMetrics::replications);

  py::class_<DriftResult>(m, "DriftResult")
      .def_readonly("stable", &DriftResult::stable)
      .def_readonly("drift", &DriftResult::drift);

  m.def("run_simulation", &run_simulation, py::arg("config"));
  m.def("run_replications", &run_replications, py::arg("config"));
  m.def(
      "detect_stability",
      [](const std::vector<double>& traj, double slots_per_point,
         double drift_threshold) {
        return detect_stability(traj, slots_per_point, drift_threshold);
      },
      py::arg("queue_sizes"), py::arg("slots_per_point") = 1.0,
      py::arg("drift_threshold") = 0.01);
}
