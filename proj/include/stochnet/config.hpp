#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochnet/models.hpp"
#include "stochnet/netcore.hpp"
#include "stochnet/reduce.hpp"
#include "stochnet/sde.hpp"

namespace stochnet {

struct NetworkConfig {
  std::string kind = "ou-random";  // ou-random | mutualistic | matrix-file
  int n = 50;
  double mu_a = 0.001;
  std::optional<std::uint64_t> seed;  // derived from sde.seed when absent
  std::filesystem::path incidence;    // mutualistic
  double mu_gamma = 0.4;
  double beta_max = -0.001;
  std::optional<double> self_regulation;  // fixed Omega diagonal; drawn like beta when absent
  std::filesystem::path matrix;  // matrix-file

  bool operator==(const NetworkConfig&) const = default;
};

struct ModelConfig {
  std::string kind = "ou";  // ou | glv | custom-coefficients
  std::vector<double> epsilon;
  double mu_alpha = 1.0;
  std::vector<double> alpha;               // explicit growth rates; drawn when empty
  std::optional<std::uint64_t> alpha_seed;  // derived from sde.seed when absent
  // custom-coefficients: homogeneous coefficients, or a per-node JSON file
  std::vector<double> self;
  std::vector<std::vector<double>> coupling;
  std::vector<double> diffusion;
  std::filesystem::path coefficients_file;
  bool nonnegative = false;
  std::string reduction = "exact";  // exact | chebyshev
  FitSpec fit;

  bool operator==(const ModelConfig&) const = default;
};

struct SdeConfig {
  double dt = 1e-3;
  double t_end = 200.0;
  int record_every = 1000;
  int realizations = 50;
  std::uint64_t seed = 1;
  bool shared_x0 = false;
  double x0_lo = 0.0;
  double x0_hi = 1.0;

  bool operator==(const SdeConfig&) const = default;
  IntegrationSpec spec() const { return {dt, t_end, record_every, seed, realizations}; }
};

struct OutputConfig {
  std::filesystem::path directory = "run";
  bool full_paths = true;

  bool operator==(const OutputConfig&) const = default;
};

struct AnalysisConfig {
  int smooth_window = 5;
  double rel_tol = 1e-3;
  double score_threshold = 0.1;
  /// Start of the window over which "stationary" statistics are averaged,
  /// as a fraction of t_end.
  double stationary_from = 0.5;

  bool operator==(const AnalysisConfig&) const = default;
};

struct ExperimentConfig {
  NetworkConfig network;
  ModelConfig model;
  SdeConfig sde;
  OutputConfig output;
  AnalysisConfig analysis;

  bool operator==(const ExperimentConfig&) const = default;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  std::uint64_t network_seed() const;
  std::uint64_t alpha_seed() const;
};

/// Relative paths inside the document are resolved against `base_dir`.
ExperimentConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

ExperimentConfig parse_config_toml(const std::string& text, const std::filesystem::path& base_dir);
std::string config_to_toml(const ExperimentConfig& cfg);

/// Loads a TOML config, or the config snapshot inside a run manifest (.json).
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies STOCHNET_SEED when set in the environment.
void apply_seed_override(ExperimentConfig& cfg);

/// The network described by the config's network section.
NetworkMatrix build_network(const ExperimentConfig& cfg);
/// Coefficient form of the node dynamics for one stochastic strength.
CoefficientModel build_coefficients(const ExperimentConfig& cfg, Eigen::Index n, double epsilon);
NodeDynamics build_dynamics(const ExperimentConfig& cfg, Eigen::Index n, double epsilon);
EffectiveModel build_effective(const ExperimentConfig& cfg, const NetworkMatrix& a, double epsilon);
Initializer build_initializer(const ExperimentConfig& cfg, Eigen::Index n);

}  // namespace stochnet
