#include "stochnet/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "stochnet/error.hpp"
#include "stochnet/io.hpp"

namespace stochnet {

namespace {

void check_component(const Ensemble& ens, Eigen::Index component) {
  for (const auto& p : ens.paths) {
    if (component < 0 || component >= p.dimension()) {
      throw Error(ErrorCode::DimensionMismatch, "component " + std::to_string(component) + " out of range");
    }
  }
}

}  // namespace

std::vector<double> ensemble_mean(const Ensemble& ens, Eigen::Index component) {
  if (ens.paths.empty()) throw Error(ErrorCode::TooFewRealizations, "ensemble is empty");
  check_component(ens, component);
  std::vector<double> mean(ens.times.size(), 0.0);
  for (const auto& p : ens.paths) {
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += p.states(static_cast<Eigen::Index>(k), component);
  }
  for (auto& m : mean) m /= static_cast<double>(ens.paths.size());
  return mean;
}

StdTrajectory ensemble_std(const Ensemble& ens, Eigen::Index component) {
  const auto r = ens.paths.size();
  if (r < 2) throw Error(ErrorCode::TooFewRealizations, "need at least two realizations, have " + std::to_string(r));
  const auto mean = ensemble_mean(ens, component);
  StdTrajectory out{ens.times, std::vector<double>(ens.times.size(), 0.0)};
  for (std::size_t k = 0; k < mean.size(); ++k) {
    double ss = 0.0;
    for (const auto& p : ens.paths) {
      const double d = p.states(static_cast<Eigen::Index>(k), component) - mean[k];
      ss += d * d;
    }
    out.std[k] = std::sqrt(ss / static_cast<double>(r - 1));
  }
  return out;
}

Path projected_trajectory(const Path& path, const MeanField& mf) {
  if (path.dimension() != mf.size()) {
    throw Error(ErrorCode::DimensionMismatch, "path dimension differs from strength vector length");
  }
  Path out;
  out.times = path.times;
  out.states = (path.states * mf.s_out()) / mf.total();
  return out;
}

Path projected_trajectory(const Path& path, const Vector& s_out) { return projected_trajectory(path, MeanField(s_out)); }

Ensemble project_ensemble(const Ensemble& full, const MeanField& mf) {
  Ensemble out;
  out.spec = full.spec;
  out.times = full.times;
  out.indices = full.indices;
  out.failures = full.failures;
  out.paths.reserve(full.paths.size());
  for (const auto& p : full.paths) out.paths.push_back(projected_trajectory(p, mf));
  return out;
}

std::vector<double> moving_average(const std::vector<double>& v, int window) {
  if (window < 1) throw Error(ErrorCode::InvalidParameter, "smoothing window must be >= 1");
  const auto n = static_cast<long>(v.size());
  const long left = (window - 1) / 2;
  const long right = window / 2;
  std::vector<double> out(v.size());
  for (long k = 0; k < n; ++k) {
    const long lo = std::max(0L, k - left);
    const long hi = std::min(n - 1, k + right);
    double acc = 0.0;
    for (long j = lo; j <= hi; ++j) acc += v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(k)] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

ConvergenceReport convergence_report(const StdTrajectory& traj, int smooth_window, double tol) {
  if (traj.std.empty() || traj.std.size() != traj.times.size()) {
    throw Error(ErrorCode::InvalidParameter, "std trajectory must be nonempty with matching times");
  }
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerance must be >= 0");
  const auto s = moving_average(traj.std, smooth_window);
  // max_element returns the first maximum, i.e. the earliest peak on ties.
  const auto peak = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());

  ConvergenceReport rep;
  rep.t_peak = traj.times[peak];
  rep.peak_std = s[peak];
  rep.final_std = s.back();
  // A peak at the last record means no decay was observed at all.
  rep.decreasing_after_peak = !(peak + 1 == s.size() && s.size() > 1 && rep.peak_std > 0.0);
  for (std::size_t k = peak; k + 1 < s.size(); ++k) {
    if (s[k] - s[k + 1] < -tol) {
      rep.decreasing_after_peak = false;
      break;
    }
  }
  rep.final_to_peak_ratio = rep.peak_std > 0.0 ? rep.final_std / rep.peak_std : 1.0;
  return rep;
}

ConvergenceReport convergence_report_relative(const StdTrajectory& traj, int smooth_window, double rel_tol) {
  if (traj.std.empty()) throw Error(ErrorCode::InvalidParameter, "std trajectory must be nonempty");
  const auto s = moving_average(traj.std, smooth_window);
  const double peak = *std::max_element(s.begin(), s.end());
  return convergence_report(traj, smooth_window, rel_tol * peak);
}

double stochasticity_score(const StdTrajectory& traj, const Ensemble& eff) {
  if (traj.std.empty()) throw Error(ErrorCode::InvalidParameter, "std trajectory is empty");
  const auto mean = ensemble_mean(eff, 0);
  double scale = 0.0;
  for (const double m : mean) scale = std::max(scale, std::abs(m));
  if (scale == 0.0) throw Error(ErrorCode::DegenerateScale, "ensemble mean is identically zero");
  return *std::max_element(traj.std.begin(), traj.std.end()) / scale;
}

double reduction_error_projected(const Ensemble& projected, const Ensemble& eff) {
  if (projected.times != eff.times) throw Error(ErrorCode::DimensionMismatch, "ensembles use different time grids");
  const auto truth = ensemble_mean(projected, 0);
  const auto approx = ensemble_mean(eff, 0);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    num += (truth[k] - approx[k]) * (truth[k] - approx[k]);
    den += truth[k] * truth[k];
  }
  if (den == 0.0) throw Error(ErrorCode::DegenerateScale, "projected mean trajectory is identically zero");
  return std::sqrt(num / den);
}

double reduction_error(const Ensemble& full, const Ensemble& eff, const MeanField& mf) {
  return reduction_error_projected(project_ensemble(full, mf), eff);
}

double time_average(const StdTrajectory& traj, double t_from) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] >= t_from) {
      acc += traj.std[k];
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::InvalidParameter, "no recorded times after t = " + io::format_double(t_from));
  return acc / static_cast<double>(count);
}

std::string format_std_csv(const StdTrajectory& traj) {
  std::string out = "t,std\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += io::format_double(traj.times[k]) + "," + io::format_double(traj.std[k]) + "\n";
  }
  return out;
}

StdTrajectory parse_std_csv(const std::string& text) {
  const auto path = parse_path_csv(text);
  if (path.dimension() != 1) throw Error(ErrorCode::ParseError, "std file must have exactly two columns");
  StdTrajectory out;
  out.times = path.times;
  out.std.assign(path.states.data(), path.states.data() + path.states.rows());
  return out;
}

nlohmann::json to_json(const ConvergenceReport& report) {
  return {{"t_peak", report.t_peak},
          {"peak_std", report.peak_std},
          {"final_std", report.final_std},
          {"decreasing_after_peak", report.decreasing_after_peak},
          {"final_to_peak_ratio", report.final_to_peak_ratio}};
}

}  // namespace stochnet
