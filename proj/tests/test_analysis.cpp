#include <cmath>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "helpers.hpp"
#include "stochnet/analysis.hpp"

using namespace stochnet;

namespace {

Ensemble scalar_ensemble(const std::vector<double>& times, const std::vector<std::vector<double>>& values) {
  Ensemble ens;
  ens.times = times;
  for (std::size_t r = 0; r < values.size(); ++r) {
    Path p;
    p.times = times;
    p.states = Matrix(static_cast<Eigen::Index>(times.size()), 1);
    for (std::size_t k = 0; k < times.size(); ++k) p.states(static_cast<Eigen::Index>(k), 0) = values[r][k];
    ens.paths.push_back(p);
    ens.indices.push_back(r);
  }
  return ens;
}

StdTrajectory traj(std::vector<double> s) {
  StdTrajectory t;
  for (std::size_t k = 0; k < s.size(); ++k) t.times.push_back(static_cast<double>(k));
  t.std = std::move(s);
  return t;
}

}  // namespace

TEST_CASE("ensemble std") {
  const auto ens = scalar_ensemble({0.0, 1.0}, {{1.0, 5.0}, {3.0, 5.0}});
  const auto s = ensemble_std(ens, 0);
  CHECK(s.std[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.std[1] == 0.0);
  CHECK(ensemble_mean(ens, 0) == std::vector<double>{2.0, 5.0});
  CHECK_THROWS_CODE(ensemble_std(scalar_ensemble({0.0}, {{1.0}}), 0), ErrorCode::TooFewRealizations);

  SUBCASE("invariant under relabeling realizations") {
    const auto a = scalar_ensemble({0.0, 1.0, 2.0}, {{1, 2, 3}, {4, 0, 1}, {2, 2, 9}});
    const auto b = scalar_ensemble({0.0, 1.0, 2.0}, {{2, 2, 9}, {1, 2, 3}, {4, 0, 1}});
    const auto sa = ensemble_std(a, 0).std;
    const auto sb = ensemble_std(b, 0).std;
    for (std::size_t k = 0; k < sa.size(); ++k) CHECK(sa[k] == doctest::Approx(sb[k]).epsilon(1e-15));
  }
}

TEST_CASE("stationary OU std of the effective equation") {
  EffectiveModel eff;
  eff.a_eff = 0.5;
  eff.b_eff = Vector::Zero(1);
  eff.c_eff = (Vector(2) << 0, -1).finished();
  eff.d_eff = Vector::Constant(1, 0.2);
  IntegrationSpec spec;
  spec.dt = 1e-2;
  spec.t_end = 40.0;
  spec.record_every = 100;
  spec.seed = 8;
  spec.realizations = 200;
  Initializer init;
  init.n = 1;
  init.fixed = Vector::Zero(1);
  const auto ens = run_ensemble(EffectiveSystem{&eff, nullptr, init, false}, spec);
  const double stationary = time_average(ensemble_std(ens, 0), 20.0);
  CHECK(stationary == doctest::Approx(0.2 / std::sqrt(2.0 * 0.5)).epsilon(0.15));
}

TEST_CASE("projection") {
  Path p;
  p.times = {0.0, 1.0};
  p.states = Matrix(2, 3);
  p.states << 1, 2, 3, 4, 4, 4;
  const auto uniform = projected_trajectory(p, MeanField(Vector::Ones(3)));
  CHECK(uniform.states(0, 0) == doctest::Approx(2.0));
  CHECK(uniform.states(1, 0) == doctest::Approx(4.0));
  const Vector s = (Vector(3) << 1, 0, 3).finished();
  const auto weighted = projected_trajectory(p, s);
  CHECK(weighted.states(0, 0) == doctest::Approx(2.5));
  CHECK(weighted.states(1, 0) == doctest::Approx(4.0));
  CHECK_THROWS_CODE(projected_trajectory(p, Vector::Ones(2)), ErrorCode::DimensionMismatch);
}

TEST_CASE("moving average") {
  CHECK(moving_average({1, 2, 3, 4, 5}, 1) == std::vector<double>{1, 2, 3, 4, 5});
  const auto m = moving_average({0, 3, 6, 9}, 3);
  CHECK(m[0] == doctest::Approx(1.5));
  CHECK(m[1] == doctest::Approx(3.0));
  CHECK(m[3] == doctest::Approx(7.5));
  CHECK(moving_average({}, 5).empty());
}

TEST_CASE("convergence report") {
  SUBCASE("hand example") {
    const auto r = convergence_report(traj({0, 1, 0.8, 0.6, 0.5}), 1, 0.0);
    CHECK(r.t_peak == 1.0);
    CHECK(r.peak_std == 1.0);
    CHECK(r.decreasing_after_peak);
    CHECK(r.final_to_peak_ratio == doctest::Approx(0.5));
  }
  SUBCASE("monotone increasing") {
    const auto r = convergence_report(traj({0.1, 0.2, 0.3, 0.4}), 1, 0.0);
    CHECK(r.t_peak == 3.0);
    CHECK_FALSE(r.decreasing_after_peak);
  }
  SUBCASE("rise after the peak beyond tolerance") {
    CHECK_FALSE(convergence_report(traj({0, 1, 0.5, 0.6, 0.4}), 1, 0.05).decreasing_after_peak);
    CHECK(convergence_report(traj({0, 1, 0.5, 0.54, 0.4}), 1, 0.05).decreasing_after_peak);
  }
  SUBCASE("all zero") {
    const auto r = convergence_report(traj({0, 0, 0}), 3, 0.0);
    CHECK(r.decreasing_after_peak);
    CHECK(r.final_to_peak_ratio == 1.0);
  }
  SUBCASE("earliest peak on ties") { CHECK(convergence_report(traj({0, 2, 2, 1}), 1, 0.0).t_peak == 1.0); }
  SUBCASE("unimodal sequences return their exact argmax") {
    for (int peak = 0; peak < 8; ++peak) {
      std::vector<double> v;
      for (int k = 0; k < 8; ++k) v.push_back(k <= peak ? k : 2.0 * peak - k);
      CHECK(convergence_report(traj(v), 1, 0.0).t_peak == peak);
    }
  }
  SUBCASE("relative tolerance") {
    const auto t = traj({0, 10, 5, 5.005, 4});
    CHECK(convergence_report_relative(t, 1, 1e-3).decreasing_after_peak);
    CHECK_FALSE(convergence_report_relative(t, 1, 1e-4).decreasing_after_peak);
  }
  SUBCASE("json fields") {
    const auto j = to_json(convergence_report(traj({0, 1, 0.5}), 1, 0.0));
    for (const char* key : {"t_peak", "peak_std", "final_std", "decreasing_after_peak", "final_to_peak_ratio"}) {
      CHECK(j.contains(key));
    }
  }
  CHECK_THROWS_CODE(convergence_report(traj({}), 1, 0.0), ErrorCode::InvalidParameter);
}

TEST_CASE("stochasticity score") {
  const auto eff = scalar_ensemble({0, 1, 2}, {{1, 2, 4}, {1, 4, 2}});
  const auto s = ensemble_std(eff, 0);
  CHECK(stochasticity_score(s, eff) == doctest::Approx(std::sqrt(2.0) / 3.0));
  const auto zero = scalar_ensemble({0, 1}, {{0, 0}, {0, 0}});
  CHECK_THROWS_CODE(stochasticity_score(ensemble_std(zero, 0), zero), ErrorCode::DegenerateScale);
  const auto flat = scalar_ensemble({0, 1}, {{2, 2}, {2, 2}});
  CHECK(stochasticity_score(ensemble_std(flat, 0), flat) == 0.0);
}

TEST_CASE("reduction error") {
  const auto a = scalar_ensemble({0, 1, 2}, {{1, 2, 3}, {3, 2, 1}});
  CHECK(reduction_error_projected(a, a) == 0.0);
  const auto b = scalar_ensemble({0, 1, 2}, {{2, 2, 2}, {2, 2, 2}});
  CHECK(reduction_error_projected(a, b) == 0.0);
  const auto c = scalar_ensemble({0, 1, 2}, {{2, 2, 3}, {2, 2, 3}});
  CHECK(reduction_error_projected(a, c) == doctest::Approx(std::sqrt(1.0 / 12.0)));
  const auto z = scalar_ensemble({0, 1, 2}, {{0, 0, 0}, {0, 0, 0}});
  CHECK_THROWS_CODE(reduction_error_projected(z, a), ErrorCode::DegenerateScale);
  const auto other = scalar_ensemble({0, 1}, {{1, 1}, {1, 1}});
  CHECK_THROWS_CODE(reduction_error_projected(a, other), ErrorCode::DimensionMismatch);
}

TEST_CASE("std csv round trip") {
  const auto t = traj({0.0, 0.25, 1.0 / 3.0});
  const auto text = format_std_csv(t);
  CHECK(text.rfind("t,std\n", 0) == 0);
  const auto back = parse_std_csv(text);
  CHECK(back.times == t.times);
  CHECK(back.std == t.std);
  CHECK(time_average(t, 1.0) == doctest::Approx((0.25 + 1.0 / 3.0) / 2.0));
  CHECK_THROWS_CODE(time_average(t, 5.0), ErrorCode::InvalidParameter);
}
