#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "secaloha/channel.hpp"
#include "secaloha/simulator.hpp"

namespace secaloha {

enum class OutputFormat { Csv, Json, Both };
std::string to_string(OutputFormat format);

/**
 * Parsed run configuration. The file format is INI-style: [channel],
 * [system], [sim] and [output] sections with key=value entries, '#' or ';'
 * comments, and comma-separated lists for vector values. Unknown sections or
 * keys are rejected with the offending line number. Randomized sections
 * (channel, sim) require an explicit seed; there is no wall-clock default.
 */
struct RunConfig {
  std::optional<ChannelParams> channel;
  std::uint64_t channel_samples = 0;
  std::uint64_t channel_seed = 0;
  bool channel_positive_part = false;

  std::optional<SystemParams> system;
  bool rho_from_channel = false;

  std::optional<SimConfig> sim;  // params filled from [system]
  bool sim_trace = false;

  std::string output_dir = "out";
  OutputFormat output_format = OutputFormat::Both;
};

/// Throws ConfigError (with line numbers where known) on structural problems:
/// unreadable file, malformed lines, unknown keys, missing required keys,
/// length mismatches, rho=from-channel without a [channel] section, or sim
/// settings that violate the simulator's invariants.
RunConfig parse_run_config(const std::string& path);

}  // namespace secaloha
