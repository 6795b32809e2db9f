#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epiwelfare/config.hpp"

namespace epiwelfare {

/// Files produced by a subcommand: (file name, contents), in write order.
using OutputSet = std::vector<std::pair<std::string, std::string>>;

inline constexpr std::string_view kVersion = "1.0.0";

OutputSet solve_outputs(const RunConfig& config);

struct SimulateFlags {
  std::optional<int> tau;
  bool no_control = false;
};
OutputSet simulate_outputs(const RunConfig& config, const SimulateFlags& flags);

OutputSet ethics_outputs(const RunConfig& config);
OutputSet sensitivity_outputs(const RunConfig& config);

/// Manifest for a run: tool version, subcommand, config hash, seed and a
/// hash of every emitted file. Deterministic; wall time is not recorded.
std::string run_manifest(const RunConfig& config, std::string_view subcommand, const OutputSet& files);

/// Writes every file plus `run_manifest` into config.out_dir.
void emit_outputs(const RunConfig& config, std::string_view subcommand, const OutputSet& files);

/// Entry point shared by the CLI binary and the tests. Exit codes: 0 success,
/// 1 configuration or usage error, 2 solver failure, 3 I/O or other failure.
int run_cli(int argc, char** argv);

}  // namespace epiwelfare
