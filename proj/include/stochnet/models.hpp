#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "stochnet/netcore.hpp"

namespace stochnet {

/// Node dynamics in the monomial basis:
///   F_i(x)      = sum_k b(i, k) x^k
///   G_i(x, y)   = sum_{p,q} dpq[i](p, q) x^p y^q
///   H_i(x)      = sum_s d(i, s) x^s
/// (0-based powers throughout).
class CoefficientModel {
 public:
  CoefficientModel(Matrix b, std::vector<Matrix> dpq, Matrix d, double fit_tolerance = 0.0);

  /// Every node shares the same coefficients.
  static CoefficientModel homogeneous(Eigen::Index n, const Vector& b, const Matrix& dpq, const Vector& d);

  Eigen::Index size() const noexcept { return b_.rows(); }
  const Matrix& self() const noexcept { return b_; }
  const std::vector<Matrix>& coupling() const noexcept { return dpq_; }
  const Matrix& diffusion() const noexcept { return d_; }
  Eigen::Index p_terms() const noexcept { return dpq_.front().rows(); }
  Eigen::Index q_terms() const noexcept { return dpq_.front().cols(); }
  /// Worst reconstruction error of the fit this model came from (0 if exact).
  double fit_tolerance() const noexcept { return fit_tolerance_; }

  /// Per-node coupling collapsed onto the diagonal: row i holds c_{i,l}.
  Matrix collapsed_coupling() const;

  double eval_self(Eigen::Index i, double x) const;
  double eval_coupling(Eigen::Index i, double xi, double xj) const;
  double eval_diffusion(Eigen::Index i, double x) const;

  CoefficientModel permuted(const std::vector<Eigen::Index>& perm) const;

 private:
  Matrix b_;
  std::vector<Matrix> dpq_;
  Matrix d_;
  double fit_tolerance_;
};

/// Allocation-free evaluation of polynomial dynamics over the whole state
/// vector. Holds scratch buffers, so use one instance per thread.
class PolynomialKernel {
 public:
  explicit PolynomialKernel(const CoefficientModel& coef);

  /// out = F(x) + sum_j A_ij G(x_i, x_j), using x_i^p (A x^q)_i per coupling term.
  void drift(const Matrix& a, const Vector& x, Vector& out);
  void diffusion(const Vector& x, Vector& out) const;

 private:
  Matrix self_;                       // n x m
  Matrix diffusion_;                  // n x t
  std::vector<Eigen::Index> used_q_;  // powers of x_j that appear in some G_i
  std::vector<Matrix> by_q_;          // n x P coefficients of x_i^p for each used q
  Vector xq_, ax_, inner_;
};

struct StochasticStrength {
  double epsilon = 0.0;

  explicit StochasticStrength(double eps);
};

/// Per-node scalar functions F_i, G_i, H_i. When the dynamics are known in
/// closed polynomial form, the coefficient model is kept alongside so the
/// network drift can be evaluated with matrix-vector products.
class NodeDynamics {
 public:
  using SelfFn = std::function<double(double)>;
  using CouplingFn = std::function<double(double, double)>;

  NodeDynamics(std::vector<SelfFn> self, std::vector<CouplingFn> coupling, std::vector<SelfFn> diffusion,
               bool nonnegative_state = false);

  static NodeDynamics from_coefficients(CoefficientModel coef, bool nonnegative_state = false);

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(self_.size()); }
  double self(Eigen::Index i, double x) const { return self_[i](x); }
  double coupling(Eigen::Index i, double xi, double xj) const { return coupling_[i](xi, xj); }
  double diffusion(Eigen::Index i, double x) const { return diffusion_[i](x); }

  const SelfFn& self_fn(Eigen::Index i) const { return self_[i]; }
  const CouplingFn& coupling_fn(Eigen::Index i) const { return coupling_[i]; }
  const SelfFn& diffusion_fn(Eigen::Index i) const { return diffusion_[i]; }

  /// States are projected onto [0, inf) after every integration step.
  bool nonnegative_state() const noexcept { return nonnegative_; }
  const std::optional<CoefficientModel>& polynomial() const noexcept { return polynomial_; }

 private:
  std::vector<SelfFn> self_;
  std::vector<CouplingFn> coupling_;
  std::vector<SelfFn> diffusion_;
  bool nonnegative_;
  std::optional<CoefficientModel> polynomial_;
};

/// dx = -A x dt + eps dW: F = 0, G(x_i, x_j) = -x_j, H = eps.
CoefficientModel ou_coefficients(Eigen::Index n, StochasticStrength eps);
NodeDynamics ou_model(Eigen::Index n, StochasticStrength eps);

/// dx_i = (alpha_i x_i + sum_j A_ij x_i x_j) dt + eps x_i dW_i.
CoefficientModel glv_coefficients(const Vector& alpha, StochasticStrength eps);
NodeDynamics glv_model(const Vector& alpha, StochasticStrength eps);

/// Growth rates alpha_i ~ normal(mu_alpha, |mu_alpha| / 3).
Vector draw_growth_rates(Eigen::Index n, double mu_alpha, std::uint64_t seed);

/// F_i(x_i) + sum_j A_ij G_i(x_i, x_j) with no mean-field approximation.
Vector full_drift(const NodeDynamics& dyn, const NetworkMatrix& a, const Vector& x);
/// Same quantity evaluated pairwise through the scalar functions only.
Vector full_drift_pairwise(const NodeDynamics& dyn, const NetworkMatrix& a, const Vector& x);
Vector full_diffusion(const NodeDynamics& dyn, const Vector& x);

}  // namespace stochnet
