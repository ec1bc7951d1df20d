#include "stochnet/reduce.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "stochnet/approx.hpp"
#include "stochnet/error.hpp"

namespace stochnet {

void EffectiveModel::validate() const {
  if (b_eff.size() < 1 || c_eff.size() < 1 || d_eff.size() < 1) {
    throw Error(ErrorCode::InvalidParameter, "effective coefficient vectors must be nonempty");
  }
  if (!std::isfinite(a_eff) || !b_eff.allFinite() || !c_eff.allFinite() || !d_eff.allFinite()) {
    throw Error(ErrorCode::InvalidParameter, "effective coefficients must be finite");
  }
}

EffectiveModel effective_params(const CoefficientModel& coef, const NetworkMatrix& a) {
  if (coef.size() != a.size()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient model has " + std::to_string(coef.size()) +
                                                  " nodes, network has " + std::to_string(a.size()));
  }
  const auto s = strengths(a);
  const MeanField mf(s.s_out);
  const Matrix c = coef.collapsed_coupling();

  EffectiveModel eff;
  eff.a_eff = mf(s.s_in);
  eff.b_eff.resize(coef.self().cols());
  for (Eigen::Index k = 0; k < coef.self().cols(); ++k) eff.b_eff(k) = mf(coef.self().col(k));
  eff.c_eff.resize(c.cols());
  for (Eigen::Index l = 0; l < c.cols(); ++l) eff.c_eff(l) = mf(c.col(l));
  eff.d_eff.resize(coef.diffusion().cols());
  for (Eigen::Index k = 0; k < coef.diffusion().cols(); ++k) eff.d_eff(k) = mf(coef.diffusion().col(k));
  eff.fit_error = coef.fit_tolerance();
  eff.validate();
  return eff;
}

double effective_drift(const EffectiveModel& eff, double x) {
  return polyval(eff.b_eff, x) + eff.a_eff * polyval(eff.c_eff, x);
}

double effective_diffusion(const EffectiveModel& eff, double x) { return polyval(eff.d_eff, x); }

CoefficientModel fit_coefficients(const NodeDynamics& dyn, const FitSpec& fit) {
  const auto n = dyn.size();
  Matrix b(n, fit.self_terms);
  Matrix d(n, fit.diffusion_terms);
  std::vector<Matrix> dpq(static_cast<std::size_t>(n));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto f = cheb_fit_1d(dyn.self_fn(i), fit.a, fit.b, fit.self_terms - 1);
    const auto g = cheb_fit_2d(dyn.coupling_fn(i), fit.a, fit.b, fit.coupling_p, fit.coupling_q);
    const auto h = cheb_fit_1d(dyn.diffusion_fn(i), fit.a, fit.b, fit.diffusion_terms - 1);
    b.row(i) = f.mono_coeffs.transpose();
    dpq[static_cast<std::size_t>(i)] = g.d_pq;
    d.row(i) = h.mono_coeffs.transpose();
    worst = std::max({worst, f.max_abs_error, g.max_abs_error, h.max_abs_error});
  }
  return CoefficientModel(std::move(b), std::move(dpq), std::move(d), worst);
}

EffectiveModel reduce_from_functions(const NodeDynamics& dyn, const NetworkMatrix& a, const FitSpec& fit) {
  return effective_params(fit_coefficients(dyn, fit), a);
}

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const EffectiveModel& eff) {
  return {{"a_eff", eff.a_eff},
          {"b_eff", to_std(eff.b_eff)},
          {"c_eff", to_std(eff.c_eff)},
          {"d_eff", to_std(eff.d_eff)},
          {"fit_error", eff.fit_error}};
}

EffectiveModel effective_from_json(const nlohmann::json& j) {
  try {
    EffectiveModel eff;
    eff.a_eff = j.at("a_eff").get<double>();
    eff.b_eff = from_std(j.at("b_eff").get<std::vector<double>>());
    eff.c_eff = from_std(j.at("c_eff").get<std::vector<double>>());
    eff.d_eff = from_std(j.at("d_eff").get<std::vector<double>>());
    eff.fit_error = j.value("fit_error", 0.0);
    eff.validate();
    return eff;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("effective model JSON: ") + e.what());
  }
}

}  // namespace stochnet
