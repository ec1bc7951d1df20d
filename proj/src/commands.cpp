#include "stochnet/commands.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "stochnet/analysis.hpp"
#include "stochnet/config.hpp"
#include "stochnet/error.hpp"
#include "stochnet/io.hpp"

namespace stochnet {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::IsolatedSpecies:
    case ErrorCode::InvalidParameter:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DegreeTooHigh:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

std::string path_file(std::size_t r) { return fmt::format("path_{:04d}.csv", r); }

std::string run_dir_name(std::size_t k) { return fmt::format("eps_{}", k); }

void write_paths(const Ensemble& ens, const fs::path& dir, json& files, const fs::path& root) {
  for (std::size_t i = 0; i < ens.paths.size(); ++i) {
    const auto file = dir / path_file(ens.indices[i]);
    io::write_text(file, format_path_csv(ens.paths[i]));
    files.push_back(fs::relative(file, root).generic_string());
  }
}

struct RunSummary {
  double epsilon = 0.0;
  double score = 0.0;
  ConvergenceReport convergence;
  double reduction_error = 0.0;
  double stationary_std = 0.0;
};

json summary_json(const RunSummary& s, double threshold) {
  return {{"epsilon", s.epsilon},
          {"stochasticity_score", s.score},
          {"regime", s.score < threshold ? "deterministic-dominated" : "stochastic"},
          {"decreasing_after_peak", s.convergence.decreasing_after_peak},
          {"final_to_peak_ratio", s.convergence.final_to_peak_ratio},
          {"reduction_error", s.reduction_error},
          {"stationary_std", s.stationary_std}};
}

RunSummary summarize(const ExperimentConfig& cfg, double epsilon, const Ensemble& projected, const Ensemble& eff,
                     const StdTrajectory& eff_std) {
  RunSummary s;
  s.epsilon = epsilon;
  s.convergence = convergence_report_relative(eff_std, cfg.analysis.smooth_window, cfg.analysis.rel_tol);
  s.stationary_std = time_average(eff_std, cfg.analysis.stationary_from * cfg.sde.t_end);
  try {
    s.score = stochasticity_score(eff_std, eff);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateScale) throw;
    s.score = std::nan("");
  }
  try {
    s.reduction_error = reduction_error_projected(projected, eff);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateScale) throw;
    s.reduction_error = std::nan("");
  }
  return s;
}

int simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  auto cfg = load_config(opts.config);
  apply_seed_override(cfg);
  if (opts.out_dir) cfg.output.directory = *opts.out_dir;
  cfg.validate();

  const fs::path root = cfg.output.directory;
  fs::create_directories(root);
  const auto network = build_network(cfg);
  const auto s = strengths(network);
  const MeanField mf(s.s_out);
  const auto spec = cfg.sde.spec();
  const auto n = network.size();

  json files = json::array();
  save_matrix_csv(network, root / "network.csv");
  files.push_back("network.csv");

  json runs = json::array();
  std::vector<RealizationFailure> all_failures;
  for (std::size_t k = 0; k < cfg.model.epsilon.size(); ++k) {
    const double eps = cfg.model.epsilon[k];
    const auto dir = root / run_dir_name(k);
    fs::remove_all(dir);
    const auto dynamics = build_dynamics(cfg, n, eps);
    const auto effective = build_effective(cfg, network, eps);
    const auto init = build_initializer(cfg, n);

    const auto full = run_ensemble(FullSystem{&dynamics, &network, init}, spec, opts.threads);
    const auto eff =
        run_ensemble(EffectiveSystem{&effective, &mf, init, dynamics.nonnegative_state()}, spec, opts.threads);
    const auto projected = project_ensemble(full, mf);

    json run_files = json::array();
    io::write_text(dir / "effective_model.json", to_json(effective).dump(2) + "\n");
    run_files.push_back(fs::relative(dir / "effective_model.json", root).generic_string());
    if (cfg.output.full_paths) write_paths(full, dir / "full", run_files, root);
    write_paths(projected, dir / "projected", run_files, root);
    write_paths(eff, dir / "effective", run_files, root);

    json failures = json::array();
    constexpr std::size_t kShownFailures = 3;
    for (const auto* ens : {&full, &eff}) {
      const char* system = ens == &full ? "full" : "effective";
      for (const auto& f : ens->failures) {
        failures.push_back({{"system", system}, {"realization", f.realization}, {"time", f.time}, {"message", f.message}});
        all_failures.push_back(f);
        if (failures.size() <= kShownFailures) {
          err << fmt::format("epsilon={} {} realization {}: {}\n", eps, system, f.realization, f.message);
        }
      }
    }
    if (failures.size() > kShownFailures) {
      err << fmt::format("epsilon={}: {} more failed realization(s), see summary.json\n", eps,
                         failures.size() - kShownFailures);
    }

    json summary = {{"epsilon", eps}, {"failures", failures}};
    if (eff.size() >= 2 && projected.size() >= 1) {
      const auto eff_std = ensemble_std(eff, 0);
      io::write_text(dir / "std_effective.csv", format_std_csv(eff_std));
      run_files.push_back(fs::relative(dir / "std_effective.csv", root).generic_string());
      if (projected.size() >= 2) {
        io::write_text(dir / "std_projected.csv", format_std_csv(ensemble_std(projected, 0)));
        run_files.push_back(fs::relative(dir / "std_projected.csv", root).generic_string());
      }
      const auto sum = summarize(cfg, eps, projected, eff, eff_std);
      io::write_text(dir / "convergence.json", to_json(sum.convergence).dump(2) + "\n");
      run_files.push_back(fs::relative(dir / "convergence.json", root).generic_string());
      summary.update(summary_json(sum, cfg.analysis.score_threshold));
      out << fmt::format("epsilon={:<10} score={:<12.6g} stationary_std={:<12.6g} decreasing={} reduction_error={:.4g}\n",
                         eps, sum.score, sum.stationary_std, sum.convergence.decreasing_after_peak,
                         sum.reduction_error);
    }
    summary["a_eff"] = effective.a_eff;
    summary["noise_variance_rate"] = mf.noise_variance_rate();
    io::write_text(dir / "summary.json", summary.dump(2) + "\n");
    run_files.push_back(fs::relative(dir / "summary.json", root).generic_string());

    runs.push_back({{"epsilon", eps}, {"directory", run_dir_name(k)}, {"files", run_files}});
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest = {{"software", "stochnet"},
                   {"version", STOCHNET_VERSION},
                   {"config", config_to_json(cfg)},
                   {"seeds", {{"master", cfg.sde.seed}, {"network", cfg.network_seed()}, {"alpha", cfg.alpha_seed()}}},
                   {"threads", opts.threads},
                   {"files", files},
                   {"runs", runs},
                   {"failed_realizations", all_failures.size()},
                   {"wall_clock_seconds", seconds}};
  io::write_text(root / "config.toml", config_to_toml(cfg));
  io::write_text(root / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << (root / "manifest.json").string() << "\n";

  if (!all_failures.empty()) {
    err << all_failures.size() << " realization(s) failed\n";
    return kExitRuntime;
  }
  return kExitOk;
}

Ensemble load_ensemble(const fs::path& root, const json& files, const std::string& prefix) {
  Ensemble ens;
  for (const auto& f : files) {
    const auto rel = f.get<std::string>();
    if (rel.rfind(prefix, 0) != 0) continue;
    auto path = load_path_csv(root / rel);
    if (ens.paths.empty()) {
      ens.times = path.times;
    } else if (path.times != ens.times) {
      throw Error(ErrorCode::ParseError, rel + ": time grid differs from the rest of the ensemble");
    }
    const auto stem = fs::path(rel).stem().string();
    ens.indices.push_back(static_cast<std::size_t>(std::stoul(stem.substr(stem.find('_') + 1))));
    ens.paths.push_back(std::move(path));
  }
  return ens;
}

std::string two_column(const std::vector<double>& x, const std::vector<double>& y) {
  std::string out;
  for (std::size_t k = 0; k < x.size(); ++k) out += io::format_double(x[k]) + " " + io::format_double(y[k]) + "\n";
  return out;
}

int report(const fs::path& root, std::ostream& out) {
  const auto manifest_path = root / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorCode::MissingManifest, "no manifest.json in " + root.string());
  }
  json manifest;
  try {
    manifest = json::parse(io::read_text(manifest_path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, manifest_path.string() + ": " + e.what());
  }
  const auto cfg = config_from_json(manifest.at("config"), {});

  std::string csv =
      "epsilon,stochasticity_score,regime,decreasing_after_peak,final_to_peak_ratio,reduction_error,stationary_std\n";
  std::string text = fmt::format("{:<12} {:>14} {:<24} {:>11} {:>12} {:>15} {:>15}\n", "epsilon", "score", "regime",
                                 "decreasing", "final/peak", "reduction_err", "stationary_std");
  std::vector<double> eps_list;
  std::vector<double> scores;
  const auto plot_dir = root / "plot";
  for (const auto& run : manifest.at("runs")) {
    const double eps = run.at("epsilon").get<double>();
    const auto dir = run.at("directory").get<std::string>();
    const auto projected = load_ensemble(root, run.at("files"), dir + "/projected/");
    const auto eff = load_ensemble(root, run.at("files"), dir + "/effective/");
    if (eff.size() < 2 || projected.size() < 1) {
      throw Error(ErrorCode::TooFewRealizations, dir + ": not enough successful realizations to report");
    }
    const auto eff_std = ensemble_std(eff, 0);
    const auto sum = summarize(cfg, eps, projected, eff, eff_std);
    const auto regime = sum.score < cfg.analysis.score_threshold ? "deterministic-dominated" : "stochastic";

    csv += fmt::format("{},{},{},{},{},{},{}\n", io::format_double(eps), io::format_double(sum.score), regime,
                       sum.convergence.decreasing_after_peak, io::format_double(sum.convergence.final_to_peak_ratio),
                       io::format_double(sum.reduction_error), io::format_double(sum.stationary_std));
    text += fmt::format("{:<12.6g} {:>14.6g} {:<24} {:>11} {:>12.4g} {:>15.4g} {:>15.6g}\n", eps, sum.score, regime,
                        sum.convergence.decreasing_after_peak ? "yes" : "no", sum.convergence.final_to_peak_ratio,
                        sum.reduction_error, sum.stationary_std);
    eps_list.push_back(eps);
    scores.push_back(sum.score);

    io::write_text(plot_dir / (dir + "_std_effective.dat"), two_column(eff_std.times, eff_std.std));
    if (projected.size() >= 2) {
      const auto p_std = ensemble_std(projected, 0);
      io::write_text(plot_dir / (dir + "_std_projected.dat"), two_column(p_std.times, p_std.std));
    }
    io::write_text(plot_dir / (dir + "_mean_projected.dat"), two_column(projected.times, ensemble_mean(projected, 0)));
    io::write_text(plot_dir / (dir + "_mean_effective.dat"), two_column(eff.times, ensemble_mean(eff, 0)));
    const auto& first = projected.paths.front();
    io::write_text(plot_dir / (dir + "_sample_projected.dat"),
                   two_column(first.times, std::vector<double>(first.states.data(), first.states.data() + first.states.rows())));
  }
  io::write_text(plot_dir / "score_vs_epsilon.dat", two_column(eps_list, scores));
  io::write_text(root / "report.csv", csv);
  io::write_text(root / "report.txt", text);
  out << text;
  return kExitOk;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return simulate(opts, out, err); });
}

int cmd_reduce(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = load_config(config);
    apply_seed_override(cfg);
    cfg.validate();
    const auto network = build_network(cfg);
    json models = json::array();
    for (const double eps : cfg.model.epsilon) {
      auto j = to_json(build_effective(cfg, network, eps));
      j["epsilon"] = eps;
      models.push_back(std::move(j));
    }
    out << models.dump(2) << "\n";
    return kExitOk;
  });
}

int cmd_report(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return report(run_dir, out); });
}

}  // namespace stochnet
