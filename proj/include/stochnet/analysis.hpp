#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stochnet/netcore.hpp"
#include "stochnet/sde.hpp"

namespace stochnet {

struct StdTrajectory {
  std::vector<double> times;
  std::vector<double> std;
};

struct ConvergenceReport {
  double t_peak = 0.0;
  double peak_std = 0.0;
  double final_std = 0.0;
  bool decreasing_after_peak = true;
  double final_to_peak_ratio = 1.0;
};

/// Cross-realization sample standard deviation (denominator R - 1) of one
/// component at every recorded time.
StdTrajectory ensemble_std(const Ensemble& ens, Eigen::Index component = 0);
std::vector<double> ensemble_mean(const Ensemble& ens, Eigen::Index component = 0);

/// L(x(t)) at every recorded time of a full-system path.
Path projected_trajectory(const Path& path, const MeanField& mf);
Path projected_trajectory(const Path& path, const Vector& s_out);
/// Projects every path of a full-system ensemble onto the effective state.
Ensemble project_ensemble(const Ensemble& full, const MeanField& mf);

/// Centered moving average; windows are clipped at the ends.
std::vector<double> moving_average(const std::vector<double>& v, int window);

/// Peak and tail behaviour of a smoothed std trajectory. `tol` is absolute:
/// after the peak every smoothed value must exceed its successor by >= -tol.
ConvergenceReport convergence_report(const StdTrajectory& traj, int smooth_window, double tol);
/// As above with tol = rel_tol * (smoothed peak).
ConvergenceReport convergence_report_relative(const StdTrajectory& traj, int smooth_window, double rel_tol);

/// max_t std(t) / max_t |mean_r x_eff(t)|.
double stochasticity_score(const StdTrajectory& traj, const Ensemble& eff);

/// Time-RMS of (mean projected full - mean effective), normalized by the
/// time-RMS of the projected full mean.
double reduction_error(const Ensemble& full, const Ensemble& eff, const MeanField& mf);
/// Same metric when the full ensemble has already been projected.
double reduction_error_projected(const Ensemble& projected, const Ensemble& eff);

/// Mean of std(t) over recorded times t >= t_from.
double time_average(const StdTrajectory& traj, double t_from);

std::string format_std_csv(const StdTrajectory& traj);
StdTrajectory parse_std_csv(const std::string& text);
nlohmann::json to_json(const ConvergenceReport& report);

}  // namespace stochnet
