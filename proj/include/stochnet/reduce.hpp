#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "stochnet/models.hpp"
#include "stochnet/netcore.hpp"

namespace stochnet {

/// Coefficients of the one-dimensional effective equation
///   dx = (sum_k b_eff[k] x^k + a_eff sum_l c_eff[l] x^l) dt + sum_s d_eff[s] x^s dW
/// with 0-based powers.
struct EffectiveModel {
  double a_eff = 0.0;
  Vector b_eff;
  Vector c_eff;
  Vector d_eff;
  /// Worst per-node fit error when built from fitted functions, 0 otherwise.
  double fit_error = 0.0;

  void validate() const;
};

EffectiveModel effective_params(const CoefficientModel& coef, const NetworkMatrix& a);

double effective_drift(const EffectiveModel& eff, double x);
double effective_diffusion(const EffectiveModel& eff, double x);

/// Domain and term counts for the Chebyshev route.
struct FitSpec {
  double a = 0.0;
  double b = 1.0;
  int self_terms = 2;       // m
  int coupling_p = 2;       // P
  int coupling_q = 2;       // Q
  int diffusion_terms = 2;  // t

  bool operator==(const FitSpec&) const = default;
};

/// Fits every F_i, G_i, H_i on the given domain and reduces the resulting
/// coefficient model. The worst fit error is kept in EffectiveModel::fit_error.
EffectiveModel reduce_from_functions(const NodeDynamics& dyn, const NetworkMatrix& a, const FitSpec& fit);
CoefficientModel fit_coefficients(const NodeDynamics& dyn, const FitSpec& fit);

nlohmann::json to_json(const EffectiveModel& eff);
EffectiveModel effective_from_json(const nlohmann::json& j);

}  // namespace stochnet
