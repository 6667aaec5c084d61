/**
 * Command-line front end for the secrecy-stability toolkit.
 *
 * Subcommands: capacity, region, optimize, simulate, sweep. Each takes a
 * config file (see README for the schema) and writes JSON/CSV artifacts under
 * the configured output directory (SECALOHA_OUTPUT_DIR overrides it).
 *
 * Exit codes: 0 success, 2 config error, 3 domain error, 4 unsupported
 * dimensionality, 5 infeasible or empty region.
 */

#include <cctype>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "secaloha/channel.hpp"
#include "secaloha/config.hpp"
#include "secaloha/errors.hpp"
#include "secaloha/json_out.hpp"
#include "secaloha/optimizer.hpp"
#include "secaloha/regions.hpp"
#include "secaloha/simulator.hpp"

namespace {

using namespace secaloha;

constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;
constexpr int kExitDimension = 4;
constexpr int kExitInfeasible = 5;

std::string output_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("SECALOHA_OUTPUT_DIR"); env && *env)
    return env;
  return cfg.output_dir;
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

void emit(const RunConfig& cfg, const std::string& name, const Json& doc) {
  if (cfg.output_format == OutputFormat::Csv) return;
  const std::string path = join_path(output_dir(cfg), name);
  write_file(path, doc.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
}

void emit_csv(const RunConfig& cfg, const std::string& name,
              const std::string& content) {
  if (cfg.output_format == OutputFormat::Json) return;
  const std::string path = join_path(output_dir(cfg), name);
  write_file(path, content);
  std::cout << "wrote " << path << "\n";
}

const SystemParams& require_system(const RunConfig& cfg) {
  if (!cfg.system.has_value())
    throw ConfigError("missing [system] section in config");
  return *cfg.system;
}

const ChannelParams& require_channel(const RunConfig& cfg) {
  if (!cfg.channel.has_value())
    throw ConfigError("missing [channel] section in config");
  return *cfg.channel;
}

RhoResult run_channel_estimate(const RunConfig& cfg) {
  const ChannelParams& cp = require_channel(cfg);
  const auto mode = cfg.channel_positive_part ? SecrecyAveraging::PositivePart
                                              : SecrecyAveraging::RawDifference;
  return compute_rho(cp, cfg.channel_samples, cfg.channel_seed, mode);
}

// Replaces a from-channel placeholder with estimated ratios.
SystemParams resolve_system(const RunConfig& cfg) {
  SystemParams sp = require_system(cfg);
  if (cfg.rho_from_channel) sp.rho = run_channel_estimate(cfg).rho;
  return sp;
}

int cmd_capacity(const std::string& config_path) {
  const RunConfig cfg = parse_run_config(config_path);
  const RhoResult rho = run_channel_estimate(cfg);
  emit(cfg, "capacity.json", capacity_json(require_channel(cfg), rho));
  if (rho.clamp_events > 0)
    std::cerr << "warning: " << rho.clamp_events
              << " secrecy ratio(s) clamped to 1\n";
  return 0;
}

int cmd_region(const std::string& config_path, const std::string& kind_name,
               int grid) {
  const RunConfig cfg = parse_run_config(config_path);
  const SystemParams sp = resolve_system(cfg);
  if (sp.n_users != 2)
    throw DimensionError("region tracing supports exactly 2 users");

  BoundaryKind kind;
  if (kind_name == "stability-dominant") {
    kind = BoundaryKind::StabilityDominant;
  } else if (kind_name == "secrecy-dominant") {
    kind = BoundaryKind::SecrecyDominant;
  } else if (kind_name == "stability-original") {
    kind = BoundaryKind::StabilityOriginal;
  } else if (kind_name == "secrecy-original") {
    kind = BoundaryKind::SecrecyOriginal;
  } else {
    throw ConfigError("unknown region kind: " + kind_name);
  }

  const auto lam = arrival_norm(sp);
  const auto polylines = trace_boundaries_n2(sp, kind, grid);
  const auto dom_stable = is_stable_dominant(sp);
  const auto dom_secure = is_secure_dominant(sp);
  const auto pe = solve_empty_probs(sp);
  const auto orig_stable = original_stability_ok(sp, pe.p_e);
  const auto orig_secure = original_secrecy_ok(sp, pe.p_e);
  const CaseLabel label = classify_case(lam, sp.rho);
  const bool nonempty = joint_region_nonempty(lam, sp.rho);

  SecrecyThresholds thresholds;
  const SecrecyThresholds* tptr = nullptr;
  if (kind == BoundaryKind::SecrecyOriginal) {
    try {
      thresholds = original_secrecy_thresholds_n2(lam, sp.rho);
      tptr = &thresholds;
    } catch (const DomainError&) {
      // Outside the closed-form regime: report the region without markers.
    }
  }

  emit(cfg, "region_report.json",
       region_json(sp, label, nonempty, dom_stable, dom_secure, pe, orig_stable,
                   orig_secure, tptr));
  emit_csv(cfg, "boundaries.csv", boundaries_csv(polylines));
  return 0;
}

int cmd_optimize(const std::string& config_path, int oracle_resolution) {
  const RunConfig cfg = parse_run_config(config_path);
  if (oracle_resolution < 2)
    throw ConfigError("oracle resolution must be >= 2");
  const SystemParams sp = resolve_system(cfg);
  if (sp.n_users != 2)
    throw DimensionError("the optimizer supports exactly 2 users");
  const OptimResult closed_form = optimize_dominant_n2(sp);
  const OptimResult oracle = grid_search_oracle(sp, oracle_resolution);
  emit(cfg, "optimize.json", optimize_json(closed_form, oracle, oracle_resolution));
  return 0;
}

int cmd_simulate(const std::string& config_path) {
  const RunConfig cfg = parse_run_config(config_path);
  if (!cfg.sim.has_value())
    throw ConfigError("missing [sim] section in config");
  SimConfig sc = *cfg.sim;
  sc.params = resolve_system(cfg);

  if (cfg.sim_trace) {
    if (sc.n_slots > 1000000)
      std::cerr << "warning: per-slot trace of " << sc.n_slots
                << " slots will be large\n";
    std::vector<SlotTraceRow> rows;
    const SimMetrics metrics = run_simulation_traced(sc, &rows);
    emit(cfg, "simulate.json", simulate_json(sc, metrics));
    emit_csv(cfg, "trace.csv", trace_csv(rows, sc.params.n_users));
    return 0;
  }
  const SimMetrics metrics = run_replications(sc);
  emit(cfg, "simulate.json", simulate_json(sc, metrics));
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              double from, double to, int steps) {
  const RunConfig cfg = parse_run_config(config_path);
  if (!cfg.sim.has_value())
    throw ConfigError("missing [sim] section in config");
  if (steps < 2) throw ConfigError("sweep needs at least 2 steps");

  SimConfig base = *cfg.sim;
  base.params = resolve_system(cfg);
  const int n = base.params.n_users;

  // Accepted parameter names: q<i>, lambda<i>, pf<i>, rho<i> with 1 <= i <= N.
  auto target = [&](SimConfig& sc) -> double* {
    auto indexed = [&](const std::string& prefix,
                       std::vector<double>& vec) -> double* {
      if (param.rfind(prefix, 0) != 0) return nullptr;
      const std::string idx = param.substr(prefix.size());
      if (idx.empty()) return nullptr;
      for (char c : idx)
        if (!std::isdigit(static_cast<unsigned char>(c))) return nullptr;
      const int i = std::stoi(idx);
      if (i < 1 || i > n)
        throw ConfigError("sweep parameter index out of range: " + param);
      return &vec[i - 1];
    };
    if (double* p = indexed("q", sc.params.tx_prob)) return p;
    if (double* p = indexed("lambda", sc.params.arrival)) return p;
    if (double* p = indexed("pf", sc.params.fail_prob)) return p;
    if (double* p = indexed("rho", sc.params.rho)) return p;
    throw ConfigError("unknown sweep parameter: " + param);
  };

  std::vector<SweepRow> rows;
  rows.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    SimConfig sc = base;
    const double value = from + (to - from) * k / (steps - 1);
    *target(sc) = value;
    SweepRow row;
    row.value = value;
    row.metrics = run_replications(sc);
    rows.push_back(std::move(row));
  }
  emit_csv(cfg, "sweep.csv", sweep_csv(param, rows, n));
  emit(cfg, "sweep.json", sweep_json(param, rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secrecy-stability analysis for slotted random access"};
  app.require_subcommand(1);

  std::string config_path;
  std::string kind = "stability-dominant";
  int grid = 201;
  int oracle_resolution = 2000;
  std::string sweep_param;
  double sweep_from = 0.0, sweep_to = 1.0;
  int sweep_steps = 21;

  auto* capacity = app.add_subcommand("capacity", "estimate per-user rates");
  capacity->add_option("config", config_path, "config file")->required();

  auto* region = app.add_subcommand("region", "trace region boundaries");
  region->add_option("config", config_path, "config file")->required();
  region->add_option("--kind", kind,
                     "stability-dominant | secrecy-dominant | "
                     "stability-original | secrecy-original");
  region->add_option("--grid", grid, "grid points per axis");

  auto* optimize = app.add_subcommand("optimize", "optimal transmission probabilities");
  optimize->add_option("config", config_path, "config file")->required();
  optimize->add_option("--oracle-resolution", oracle_resolution,
                       "grid oracle intervals per axis");

  auto* simulate = app.add_subcommand("simulate", "run the queue simulator");
  simulate->add_option("config", config_path, "config file")->required();

  auto* sweep = app.add_subcommand("sweep", "sweep one parameter over simulations");
  sweep->add_option("config", config_path, "config file")->required();
  sweep->add_option("--param", sweep_param, "q<i>, lambda<i>, pf<i> or rho<i>")
      ->required();
  sweep->add_option("--from", sweep_from, "first value");
  sweep->add_option("--to", sweep_to, "last value");
  sweep->add_option("--steps", sweep_steps, "number of sweep points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (capacity->parsed()) return cmd_capacity(config_path);
    if (region->parsed()) return cmd_region(config_path, kind, grid);
    if (optimize->parsed()) return cmd_optimize(config_path, oracle_resolution);
    if (simulate->parsed()) return cmd_simulate(config_path);
    if (sweep->parsed())
      return cmd_sweep(config_path, sweep_param, sweep_from, sweep_to, sweep_steps);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "unsupported dimensionality: " << e.what() << "\n";
    return kExitDimension;
  } catch (const InfeasibleRegion& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const EmptyFeasibleSet& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
