#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

namespace stochnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

struct SimulateOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;
  int threads = 1;
};

/// Runs the full and effective ensembles for every configured epsilon and
/// writes paths, std trajectories, convergence reports and a run manifest.
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

/// Prints the effective model (JSON) for each configured epsilon.
int cmd_reduce(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Summarizes a finished run directory and writes plot-data files.
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

}  // namespace stochnet
