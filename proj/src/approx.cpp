#include "stochnet/approx.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "stochnet/error.hpp"

namespace stochnet {

namespace {

void check_interval(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidParameter, "fit interval must satisfy a < b");
  }
}

using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// First-kind Chebyshev points on [-1, 1].
LVector reference_nodes(int n) {
  LVector t(n);
  for (int k = 0; k < n; ++k) t(k) = std::cos(std::numbers::pi_v<long double> * (k + 0.5L) / n);
  return t;
}

// Samples at the first-kind points -> Chebyshev coefficients (discrete
// orthogonality), then -> monomials in t, then -> monomials in
// x = ((b - a) t + a + b) / 2. The three steps are applied to the vector one
// after another: the combined operator has entries near 1e8 at degree 12 and
// would cost most of the available digits. Long double buys the rest.
Eigen::VectorXd samples_to_monomial(const Eigen::Ref<const Eigen::VectorXd>& samples, double a, double b) {
  const auto n = static_cast<int>(samples.size());
  const auto t = reference_nodes(n);
  LVector cheb = LVector::Zero(n);
  for (int j = 0; j < n; ++j) {
    long double acc = 0.0L;
    for (int k = 0; k < n; ++k) acc += static_cast<long double>(samples(k)) * std::cos(j * std::acos(t(k)));
    cheb(j) = acc * (j == 0 ? 1.0L : 2.0L) / n;
  }

  // Expand sum c_j T_j(t) in powers of t with the three-term recurrence.
  LVector mono_t = LVector::Zero(n);
  LVector prev = LVector::Zero(n);
  LVector cur = LVector::Zero(n);
  cur(0) = 1.0L;
  for (int j = 0; j < n; ++j) {
    mono_t += cheb(j) * cur;
    LVector next = -prev;
    for (int p = 0; p + 1 < n; ++p) next(p + 1) += (j == 0 ? 1.0L : 2.0L) * cur(p);
    prev = cur;
    cur = next;
  }

  // t = alpha x + beta; Horner in t with polynomial arithmetic in x.
  const long double alpha = 2.0L / (static_cast<long double>(b) - a);
  const long double beta = -(static_cast<long double>(a) + b) / (static_cast<long double>(b) - a);
  LVector out = LVector::Zero(n);
  for (int k = n; k-- > 0;) {
    LVector shifted = LVector::Zero(n);
    for (int p = 0; p < n; ++p) {
      shifted(p) += beta * out(p);
      if (p + 1 < n) shifted(p + 1) += alpha * out(p);
    }
    shifted(0) += mono_t(k);
    out = shifted;
  }
  return out.cast<double>();
}

}  // namespace

Eigen::MatrixXd chebyshev_to_monomial(int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  if (n >= 1) m(0, 0) = 1.0;
  if (n >= 2) m(1, 1) = 1.0;
  for (int j = 2; j < n; ++j) {
    // T_j = 2 t T_{j-1} - T_{j-2}
    for (int p = 0; p < n; ++p) {
      double v = -m(p, j - 2);
      if (p >= 1) v += 2.0 * m(p - 1, j - 1);
      m(p, j) = v;
    }
  }
  return m;
}

double polyval(const Eigen::Ref<const Eigen::VectorXd>& coeffs, double x) {
  double acc = 0.0;
  for (Eigen::Index k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs(k);
  return acc;
}

double ChebFit1D::operator()(double x) const { return polyval(mono_coeffs, x); }

double ChebFit2D::operator()(double x, double y) const {
  double acc = 0.0;
  for (Eigen::Index p = d_pq.rows(); p-- > 0;) acc = acc * x + polyval(d_pq.row(p).transpose(), y);
  return acc;
}

ChebFit1D cheb_fit_1d(const std::function<double(double)>& f, double a, double b, int degree) {
  check_interval(a, b);
  if (degree < 0) throw Error(ErrorCode::InvalidParameter, "degree must be >= 0");
  if (degree > kMaxDegree1D) {
    throw Error(ErrorCode::DegreeTooHigh, "degree " + std::to_string(degree) + " exceeds " +
                                              std::to_string(kMaxDegree1D));
  }
  const int n = degree + 1;
  const auto t = reference_nodes(n);
  Eigen::VectorXd samples(n);
  for (int k = 0; k < n; ++k) {
    const double x = 0.5 * (a + b) + 0.5 * (b - a) * static_cast<double>(t(k));
    samples(k) = f(x);
    if (!std::isfinite(samples(k))) {
      throw Error(ErrorCode::NonFiniteSample, "f is not finite at x = " + std::to_string(x));
    }
  }
  ChebFit1D fit;
  fit.a = a;
  fit.b = b;
  fit.degree = degree;
  fit.mono_coeffs = samples_to_monomial(samples, a, b);

  constexpr int kGrid = 1000;
  for (int i = 0; i < kGrid; ++i) {
    const double x = a + (b - a) * i / (kGrid - 1);
    fit.max_abs_error = std::max(fit.max_abs_error, std::abs(f(x) - fit(x)));
  }
  return fit;
}

ChebFit2D cheb_fit_2d(const std::function<double(double, double)>& g, double a, double b, int p_terms,
                      int q_terms) {
  check_interval(a, b);
  for (const int n : {p_terms, q_terms}) {
    if (n < 1) throw Error(ErrorCode::InvalidParameter, "term counts must be >= 1");
    if (n > kMaxTerms2D) {
      throw Error(ErrorCode::DegreeTooHigh, std::to_string(n) + " terms per axis exceeds " +
                                                std::to_string(kMaxTerms2D));
    }
  }
  const auto tx = reference_nodes(p_terms);
  const auto ty = reference_nodes(q_terms);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Eigen::MatrixXd samples(p_terms, q_terms);
  for (int i = 0; i < p_terms; ++i) {
    for (int j = 0; j < q_terms; ++j) {
      const double x = mid + half * static_cast<double>(tx(i));
      const double y = mid + half * static_cast<double>(ty(j));
      samples(i, j) = g(x, y);
      if (!std::isfinite(samples(i, j))) {
        throw Error(ErrorCode::NonFiniteSample,
                    "g is not finite at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
      }
    }
  }
  // Convert along x for every column, then along y for every row.
  Eigen::MatrixXd along_x(p_terms, q_terms);
  for (int j = 0; j < q_terms; ++j) along_x.col(j) = samples_to_monomial(samples.col(j), a, b);
  Eigen::MatrixXd d_pq(p_terms, q_terms);
  for (int i = 0; i < p_terms; ++i) d_pq.row(i) = samples_to_monomial(along_x.row(i).transpose(), a, b).transpose();

  ChebFit2D fit;
  fit.a = a;
  fit.b = b;
  fit.p_terms = p_terms;
  fit.q_terms = q_terms;
  fit.d_pq = std::move(d_pq);

  constexpr int kGrid = 100;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double x = a + (b - a) * i / (kGrid - 1);
      const double y = a + (b - a) * j / (kGrid - 1);
      fit.max_abs_error = std::max(fit.max_abs_error, std::abs(g(x, y) - fit(x, y)));
    }
  }
  return fit;
}

Eigen::VectorXd collapse_coupling(const Eigen::MatrixXd& d_pq) {
  if (d_pq.rows() < 1 || d_pq.cols() < 1) throw Error(ErrorCode::InvalidParameter, "empty coupling tensor");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d_pq.rows() + d_pq.cols() - 1);
  for (Eigen::Index p = 0; p < d_pq.rows(); ++p) {
    for (Eigen::Index q = 0; q < d_pq.cols(); ++q) c(p + q) += d_pq(p, q);
  }
  return c;
}

}  // namespace stochnet
