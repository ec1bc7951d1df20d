#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "stochnet/models.hpp"
#include "stochnet/netcore.hpp"
#include "stochnet/reduce.hpp"

namespace stochnet {

inline constexpr double kBlowUpThreshold = 1e12;

struct IntegrationSpec {
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 1;
  std::uint64_t seed = 0;
  int realizations = 1;

  void validate() const;
  long long steps() const;
  /// Recorded time points: 0, record_every*dt, ... up to t_end.
  std::vector<double> record_times() const;
};

/// Realization r draws from its own generator seeded with
/// splitmix64(splitmix64(master) + (r + 1) * 0x9e3779b97f4a7c15).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t realization);
std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t realization);

/// Stream index reserved for a shared initial condition.
inline constexpr std::uint64_t kSharedInitialStream = 0xffffffffffffffffULL;

struct Path {
  std::vector<double> times;
  Matrix states;  // one row per recorded time, one column per component

  Eigen::Index dimension() const noexcept { return states.cols(); }
};

/// Initial state: either a fixed vector or iid uniform draws on [lo, hi].
/// With `shared`, every realization uses the single draw taken from the
/// reserved stream; otherwise each realization draws from its own stream
/// before integrating.
struct Initializer {
  Eigen::Index n = 1;
  double lo = 0.0;
  double hi = 1.0;
  std::optional<Vector> fixed;
  bool shared = false;

  Vector draw(std::mt19937_64& rng) const;
  Vector initial_state(std::uint64_t master, std::uint64_t realization, std::mt19937_64& stream) const;
};

Path integrate_full(const NodeDynamics& dyn, const NetworkMatrix& a, const Vector& x0, const IntegrationSpec& spec,
                    std::uint64_t realization);
/// Continues from a generator that may already have been used for x0.
Path integrate_full(const NodeDynamics& dyn, const NetworkMatrix& a, const Vector& x0, const IntegrationSpec& spec,
                    std::mt19937_64& rng);

/// `nonnegative` clamps the scalar state at zero after each step.
Path integrate_effective(const EffectiveModel& eff, double x0, const IntegrationSpec& spec, std::uint64_t realization,
                         bool nonnegative = false);
Path integrate_effective(const EffectiveModel& eff, double x0, const IntegrationSpec& spec, std::mt19937_64& rng,
                         bool nonnegative = false);

struct FullSystem {
  const NodeDynamics* dynamics;
  const NetworkMatrix* network;
  Initializer init;
};

/// The effective equation, started from L(x0) of the same N-dimensional
/// initial draw the full system would use for that realization.
struct EffectiveSystem {
  const EffectiveModel* model;
  const MeanField* projection;  // null: the initializer is already scalar
  Initializer init;
  bool nonnegative = false;
};

using System = std::variant<FullSystem, EffectiveSystem>;

struct RealizationFailure {
  std::size_t realization;
  double time;
  std::string message;
};

struct Ensemble {
  IntegrationSpec spec;
  std::vector<double> times;
  std::vector<Path> paths;            // successful realizations only
  std::vector<std::size_t> indices;   // realization index of each entry in paths
  std::vector<RealizationFailure> failures;

  std::size_t size() const noexcept { return paths.size(); }
};

/// Runs spec.realizations independent paths. Output is identical for every
/// thread count; `threads` <= 0 picks the hardware concurrency.
Ensemble run_ensemble(const System& system, const IntegrationSpec& spec, int threads = 1);

std::string format_path_csv(const Path& path, const std::vector<std::string>& columns);
/// Columns t,x_1..x_n (or t,x_eff for a scalar path).
std::string format_path_csv(const Path& path);
Path parse_path_csv(const std::string& text);
Path load_path_csv(const std::filesystem::path& file);

}  // namespace stochnet
