#pragma once

#include <functional>

#include <Eigen/Dense>

namespace stochnet {

inline constexpr int kMaxDegree1D = 12;
inline constexpr int kMaxTerms2D = 8;

/// Polynomial fit of a scalar function, stored in the monomial basis.
struct ChebFit1D {
  double a = 0.0;
  double b = 1.0;
  int degree = 0;
  Eigen::VectorXd mono_coeffs;  // coefficient of x^k at index k
  double max_abs_error = 0.0;   // over a 1000-point uniform grid on [a, b]

  double operator()(double x) const;
};

/// Tensor-product fit g(x, y) ~ sum_{p,q} d(p, q) x^p y^q (0-based powers).
struct ChebFit2D {
  double a = 0.0;
  double b = 1.0;
  int p_terms = 1;
  int q_terms = 1;
  Eigen::MatrixXd d_pq;        // p_terms x q_terms
  double max_abs_error = 0.0;  // over a 100x100 uniform grid on [a, b]^2

  double operator()(double x, double y) const;
};

/// Interpolates f at the degree+1 first-kind Chebyshev points of [a, b].
ChebFit1D cheb_fit_1d(const std::function<double(double)>& f, double a, double b, int degree);

/// Interpolates g on the P x Q tensor grid of first-kind Chebyshev points.
ChebFit2D cheb_fit_2d(const std::function<double(double, double)>& g, double a, double b, int p_terms,
                      int q_terms);

/// c_l = sum over p + q = l of d(p, q), i.e. the monomial coefficients of
/// g(z, z). Output length is P + Q - 1.
Eigen::VectorXd collapse_coupling(const Eigen::MatrixXd& d_pq);

/// Horner evaluation of sum_k coeffs[k] x^k.
double polyval(const Eigen::Ref<const Eigen::VectorXd>& coeffs, double x);

/// Monomial coefficients of T_0 .. T_{n-1} in t: column j holds T_j.
Eigen::MatrixXd chebyshev_to_monomial(int n);

}  // namespace stochnet
