#include "stochnet/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "stochnet/error.hpp"
#include "stochnet/io.hpp"

namespace stochnet {

void IntegrationSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidParameter, "dt must be > 0");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw Error(ErrorCode::InvalidParameter, "t_end must be >= dt");
  if (record_every < 1) throw Error(ErrorCode::InvalidParameter, "record_every must be >= 1");
  if (realizations < 1) throw Error(ErrorCode::InvalidParameter, "realizations must be >= 1");
}

long long IntegrationSpec::steps() const { return static_cast<long long>(std::floor(t_end / dt + 1e-9)); }

std::vector<double> IntegrationSpec::record_times() const {
  std::vector<double> t;
  for (long long k = 0; k <= steps(); k += record_every) t.push_back(static_cast<double>(k) * dt);
  return t;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t realization) {
  return splitmix64(splitmix64(master) + (realization + 1) * 0x9e3779b97f4a7c15ULL);
}

std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t realization) {
  return std::mt19937_64(stream_seed(master, realization));
}

Vector Initializer::draw(std::mt19937_64& rng) const {
  if (fixed) return *fixed;
  std::uniform_real_distribution<double> u(lo, hi);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

Vector Initializer::initial_state(std::uint64_t master, std::uint64_t /*realization*/, std::mt19937_64& stream) const {
  if (shared && !fixed) {
    auto rng = make_stream(master, kSharedInitialStream);
    return draw(rng);
  }
  return draw(stream);
}

namespace {

template <typename Step>
Path integrate(Vector x, const IntegrationSpec& spec, std::mt19937_64& rng, bool nonnegative, Step&& step) {
  spec.validate();
  const auto n = x.size();
  if (!x.allFinite()) throw Error(ErrorCode::InvalidParameter, "initial state must be finite");

  Path path;
  path.times = spec.record_times();
  path.states.resize(static_cast<Eigen::Index>(path.times.size()), n);
  path.states.row(0) = x.transpose();

  const double sqrt_dt = std::sqrt(spec.dt);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  const auto steps = spec.steps();
  Eigen::Index row = 1;
  for (long long k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k - 1) * spec.dt;
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
    try {
      step(x, z, spec.dt, sqrt_dt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFiniteState) throw;
      throw BlowUpError(t, "non-finite state at t = " + io::format_double(t));
    }
    if (nonnegative) x = x.cwiseMax(0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(x(i)) || std::abs(x(i)) > kBlowUpThreshold) {
        const double now = static_cast<double>(k) * spec.dt;
        throw BlowUpError(now, "component " + std::to_string(i) + " left the bounded range at t = " +
                                   io::format_double(now));
      }
    }
    if (k % spec.record_every == 0) path.states.row(row++) = x.transpose();
  }
  return path;
}

}  // namespace

Path integrate_full(const NodeDynamics& dyn, const NetworkMatrix& a, const Vector& x0, const IntegrationSpec& spec,
                    std::mt19937_64& rng) {
  if (x0.size() != dyn.size() || a.size() != dyn.size()) {
    throw Error(ErrorCode::DimensionMismatch, "initial state, dynamics and network sizes differ");
  }
  if (dyn.polynomial()) {
    PolynomialKernel kernel(*dyn.polynomial());
    Vector drift(x0.size());
    Vector diff(x0.size());
    return integrate(x0, spec, rng, dyn.nonnegative_state(),
                     [&](Vector& x, const Vector& z, double dt, double sqrt_dt) {
                       kernel.drift(a.weights(), x, drift);
                       kernel.diffusion(x, diff);
                       x.array() += drift.array() * dt + diff.array() * z.array() * sqrt_dt;
                     });
  }
  return integrate(x0, spec, rng, dyn.nonnegative_state(),
                   [&](Vector& x, const Vector& z, double dt, double sqrt_dt) {
                     const Vector drift = full_drift(dyn, a, x);
                     const Vector diff = full_diffusion(dyn, x);
                     x.array() += drift.array() * dt + diff.array() * z.array() * sqrt_dt;
                   });
}

Path integrate_full(const NodeDynamics& dyn, const NetworkMatrix& a, const Vector& x0, const IntegrationSpec& spec,
                    std::uint64_t realization) {
  auto rng = make_stream(spec.seed, realization);
  return integrate_full(dyn, a, x0, spec, rng);
}

Path integrate_effective(const EffectiveModel& eff, double x0, const IntegrationSpec& spec, std::mt19937_64& rng,
                         bool nonnegative) {
  eff.validate();
  return integrate(Vector::Constant(1, x0), spec, rng, nonnegative,
                   [&](Vector& x, const Vector& z, double dt, double sqrt_dt) {
                     const double v = x(0);
                     x(0) = v + effective_drift(eff, v) * dt + effective_diffusion(eff, v) * z(0) * sqrt_dt;
                   });
}

Path integrate_effective(const EffectiveModel& eff, double x0, const IntegrationSpec& spec, std::uint64_t realization,
                         bool nonnegative) {
  auto rng = make_stream(spec.seed, realization);
  return integrate_effective(eff, x0, spec, rng, nonnegative);
}

namespace {

Path run_one(const System& system, const IntegrationSpec& spec, std::uint64_t r) {
  auto rng = make_stream(spec.seed, r);
  return std::visit(
      [&](const auto& sys) -> Path {
        using T = std::decay_t<decltype(sys)>;
        const Vector x0 = sys.init.initial_state(spec.seed, r, rng);
        if constexpr (std::is_same_v<T, FullSystem>) {
          return integrate_full(*sys.dynamics, *sys.network, x0, spec, rng);
        } else {
          const double start = sys.projection ? (*sys.projection)(x0) : x0(0);
          return integrate_effective(*sys.model, start, spec, rng, sys.nonnegative);
        }
      },
      system);
}

}  // namespace

Ensemble run_ensemble(const System& system, const IntegrationSpec& spec, int threads) {
  spec.validate();
  const auto count = static_cast<std::size_t>(spec.realizations);
  std::vector<std::optional<Path>> slots(count);
  std::vector<std::optional<RealizationFailure>> failed(count);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < count; r = next++) {
      try {
        slots[r] = run_one(system, spec, r);
      } catch (const BlowUpError& e) {
        failed[r] = RealizationFailure{r, e.time(), e.detail()};
      }
    }
  };

  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  Ensemble ens;
  ens.spec = spec;
  ens.times = spec.record_times();
  for (std::size_t r = 0; r < count; ++r) {
    if (slots[r]) {
      ens.paths.push_back(std::move(*slots[r]));
      ens.indices.push_back(r);
    } else if (failed[r]) {
      ens.failures.push_back(std::move(*failed[r]));
    }
  }
  return ens;
}

std::string format_path_csv(const Path& path, const std::vector<std::string>& columns) {
  if (static_cast<Eigen::Index>(columns.size()) != path.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "column names do not match path dimension");
  }
  std::string out = "t";
  for (const auto& c : columns) out += "," + c;
  out += '\n';
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    out += io::format_double(path.times[k]);
    for (Eigen::Index j = 0; j < path.dimension(); ++j) {
      out += ',';
      out += io::format_double(path.states(static_cast<Eigen::Index>(k), j));
    }
    out += '\n';
  }
  return out;
}

std::string format_path_csv(const Path& path) {
  std::vector<std::string> cols;
  if (path.dimension() == 1) {
    cols.emplace_back("x_eff");
  } else {
    for (Eigen::Index j = 0; j < path.dimension(); ++j) cols.push_back("x_" + std::to_string(j + 1));
  }
  return format_path_csv(path, cols);
}

Path parse_path_csv(const std::string& text) {
  const auto lines = io::split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "path file is empty");
  const auto header = io::split_csv_line(lines.front());
  if (header.size() < 2 || header.front() != "t") throw Error(ErrorCode::ParseError, "line 1: expected header t,...");
  const auto dim = static_cast<Eigen::Index>(header.size() - 1);
  std::vector<std::vector<double>> rows;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (io::trim(lines[ln]).empty()) continue;
    const auto cells = io::split_csv_line(lines[ln]);
    if (static_cast<Eigen::Index>(cells.size()) != dim + 1) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(ln + 1) + ": ragged row");
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!io::parse_double(cells[c], row[c])) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(ln + 1) + ": bad number '" + cells[c] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  Path path;
  path.states.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    path.times.push_back(rows[k][0]);
    for (Eigen::Index j = 0; j < dim; ++j) path.states(static_cast<Eigen::Index>(k), j) = rows[k][j + 1];
  }
  return path;
}

Path load_path_csv(const std::filesystem::path& file) { return parse_path_csv(io::read_text(file)); }

}  // namespace stochnet
