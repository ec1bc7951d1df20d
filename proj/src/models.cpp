#include "stochnet/models.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "stochnet/approx.hpp"
#include "stochnet/error.hpp"

namespace stochnet {

CoefficientModel::CoefficientModel(Matrix b, std::vector<Matrix> dpq, Matrix d, double fit_tolerance)
    : b_(std::move(b)), dpq_(std::move(dpq)), d_(std::move(d)), fit_tolerance_(fit_tolerance) {
  const auto n = b_.rows();
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "coefficient model needs at least one node");
  if (static_cast<Eigen::Index>(dpq_.size()) != n || d_.rows() != n) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient blocks disagree on node count");
  }
  if (b_.cols() < 1 || d_.cols() < 1) throw Error(ErrorCode::InvalidParameter, "m and t must be >= 1");
  const auto p = dpq_.front().rows();
  const auto q = dpq_.front().cols();
  if (p < 1 || q < 1) throw Error(ErrorCode::InvalidParameter, "P and Q must be >= 1");
  for (const auto& m : dpq_) {
    if (m.rows() != p || m.cols() != q) throw Error(ErrorCode::DimensionMismatch, "coupling tensors differ in shape");
    if (!m.allFinite()) throw Error(ErrorCode::InvalidParameter, "coupling coefficients must be finite");
  }
  if (!b_.allFinite() || !d_.allFinite()) throw Error(ErrorCode::InvalidParameter, "coefficients must be finite");
  if (!(fit_tolerance_ >= 0.0)) throw Error(ErrorCode::InvalidParameter, "fit tolerance must be >= 0");
}

CoefficientModel CoefficientModel::homogeneous(Eigen::Index n, const Vector& b, const Matrix& dpq, const Vector& d) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "n must be >= 1");
  return CoefficientModel(b.transpose().replicate(n, 1), std::vector<Matrix>(static_cast<std::size_t>(n), dpq),
                          d.transpose().replicate(n, 1));
}

Matrix CoefficientModel::collapsed_coupling() const {
  Matrix c(size(), p_terms() + q_terms() - 1);
  for (Eigen::Index i = 0; i < size(); ++i) c.row(i) = collapse_coupling(dpq_[i]).transpose();
  return c;
}

double CoefficientModel::eval_self(Eigen::Index i, double x) const { return polyval(b_.row(i).transpose(), x); }

double CoefficientModel::eval_coupling(Eigen::Index i, double xi, double xj) const {
  const auto& m = dpq_[i];
  double acc = 0.0;
  for (Eigen::Index p = m.rows(); p-- > 0;) acc = acc * xi + polyval(m.row(p).transpose(), xj);
  return acc;
}

double CoefficientModel::eval_diffusion(Eigen::Index i, double x) const { return polyval(d_.row(i).transpose(), x); }

CoefficientModel CoefficientModel::permuted(const std::vector<Eigen::Index>& perm) const {
  check_permutation(perm, size());
  Matrix b(b_.rows(), b_.cols());
  Matrix d(d_.rows(), d_.cols());
  std::vector<Matrix> dpq(dpq_.size());
  for (Eigen::Index k = 0; k < size(); ++k) {
    b.row(k) = b_.row(perm[k]);
    d.row(k) = d_.row(perm[k]);
    dpq[k] = dpq_[perm[k]];
  }
  return CoefficientModel(std::move(b), std::move(dpq), std::move(d), fit_tolerance_);
}

StochasticStrength::StochasticStrength(double eps) : epsilon(eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::InvalidParameter, "stochastic strength must be finite and >= 0");
  }
}

NodeDynamics::NodeDynamics(std::vector<SelfFn> self, std::vector<CouplingFn> coupling, std::vector<SelfFn> diffusion,
                           bool nonnegative_state)
    : self_(std::move(self)),
      coupling_(std::move(coupling)),
      diffusion_(std::move(diffusion)),
      nonnegative_(nonnegative_state) {
  if (self_.empty()) throw Error(ErrorCode::InvalidParameter, "dynamics need at least one node");
  if (coupling_.size() != self_.size() || diffusion_.size() != self_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "F, G and H lists must have equal length");
  }
}

NodeDynamics NodeDynamics::from_coefficients(CoefficientModel coef, bool nonnegative_state) {
  const auto n = static_cast<std::size_t>(coef.size());
  auto shared = std::make_shared<const CoefficientModel>(coef);
  std::vector<SelfFn> self(n);
  std::vector<CouplingFn> coupling(n);
  std::vector<SelfFn> diffusion(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    self[i] = [shared, k](double x) { return shared->eval_self(k, x); };
    coupling[i] = [shared, k](double xi, double xj) { return shared->eval_coupling(k, xi, xj); };
    diffusion[i] = [shared, k](double x) { return shared->eval_diffusion(k, x); };
  }
  NodeDynamics dyn(std::move(self), std::move(coupling), std::move(diffusion), nonnegative_state);
  dyn.polynomial_ = std::move(coef);
  return dyn;
}

CoefficientModel ou_coefficients(Eigen::Index n, StochasticStrength eps) {
  Matrix dpq = Matrix::Zero(1, 2);
  dpq(0, 1) = -1.0;
  return CoefficientModel::homogeneous(n, Vector::Zero(1), dpq, Vector::Constant(1, eps.epsilon));
}

NodeDynamics ou_model(Eigen::Index n, StochasticStrength eps) {
  return NodeDynamics::from_coefficients(ou_coefficients(n, eps));
}

CoefficientModel glv_coefficients(const Vector& alpha, StochasticStrength eps) {
  const auto n = alpha.size();
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "alpha must be nonempty");
  if (!alpha.allFinite()) throw Error(ErrorCode::InvalidParameter, "alpha must be finite");
  Matrix b = Matrix::Zero(n, 2);
  b.col(1) = alpha;
  Matrix dpq = Matrix::Zero(2, 2);
  dpq(1, 1) = 1.0;
  Matrix d = Matrix::Zero(n, 2);
  d.col(1).setConstant(eps.epsilon);
  return CoefficientModel(std::move(b), std::vector<Matrix>(static_cast<std::size_t>(n), dpq), std::move(d));
}

NodeDynamics glv_model(const Vector& alpha, StochasticStrength eps) {
  return NodeDynamics::from_coefficients(glv_coefficients(alpha, eps), true);
}

Vector draw_growth_rates(Eigen::Index n, double mu_alpha, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "n must be >= 1");
  if (!std::isfinite(mu_alpha)) throw Error(ErrorCode::InvalidParameter, "mu_alpha must be finite");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> draw(mu_alpha, std::abs(mu_alpha) / 3.0);
  Vector alpha(n);
  for (Eigen::Index i = 0; i < n; ++i) alpha(i) = draw(rng);
  return alpha;
}

namespace {

// Column-wise Horner: out_i = sum_k c(i, k) x_i^k.
void horner_rows(const Matrix& c, const Vector& x, Vector& out) {
  const auto last = c.cols() - 1;
  out = c.col(last);
  for (Eigen::Index k = last; k-- > 0;) out.array() = out.array() * x.array() + c.col(k).array();
}

}  // namespace

PolynomialKernel::PolynomialKernel(const CoefficientModel& coef)
    : self_(coef.self()), diffusion_(coef.diffusion()) {
  const auto n = coef.size();
  for (Eigen::Index q = 0; q < coef.q_terms(); ++q) {
    Matrix m(n, coef.p_terms());
    for (Eigen::Index i = 0; i < n; ++i) m.row(i) = coef.coupling()[static_cast<std::size_t>(i)].col(q).transpose();
    if (m.isZero(0.0)) continue;
    used_q_.push_back(q);
    by_q_.push_back(std::move(m));
  }
  xq_.resize(n);
  ax_.resize(n);
  inner_.resize(n);
}

void PolynomialKernel::drift(const Matrix& a, const Vector& x, Vector& out) {
  horner_rows(self_, x, out);
  xq_.setOnes();
  Eigen::Index power = 0;
  for (std::size_t k = 0; k < used_q_.size(); ++k) {
    for (; power < used_q_[k]; ++power) xq_.array() *= x.array();
    ax_.noalias() = a * xq_;
    horner_rows(by_q_[k], x, inner_);
    out.array() += inner_.array() * ax_.array();
  }
}

void PolynomialKernel::diffusion(const Vector& x, Vector& out) const { horner_rows(diffusion_, x, out); }

namespace {

void check_dims(const NodeDynamics& dyn, Eigen::Index nx) {
  if (dyn.size() != nx) {
    throw Error(ErrorCode::DimensionMismatch, "state has " + std::to_string(nx) + " components, dynamics have " +
                                                  std::to_string(dyn.size()));
  }
}

void check_finite(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) {
      throw Error(ErrorCode::NonFiniteState, std::string(what) + " component " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

Vector full_drift_pairwise(const NodeDynamics& dyn, const NetworkMatrix& a, const Vector& x) {
  check_dims(dyn, x.size());
  if (a.size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "network and state sizes differ");
  const auto n = x.size();
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = a(i, j);
      if (w != 0.0) acc += w * dyn.coupling(i, x(i), x(j));
    }
    out(i) = dyn.self(i, x(i)) + acc;
  }
  check_finite(out, "drift");
  return out;
}

Vector full_drift(const NodeDynamics& dyn, const NetworkMatrix& a, const Vector& x) {
  if (!dyn.polynomial()) return full_drift_pairwise(dyn, a, x);
  check_dims(dyn, x.size());
  if (a.size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "network and state sizes differ");
  PolynomialKernel kernel(*dyn.polynomial());
  Vector out(x.size());
  kernel.drift(a.weights(), x, out);
  check_finite(out, "drift");
  return out;
}

Vector full_diffusion(const NodeDynamics& dyn, const Vector& x) {
  check_dims(dyn, x.size());
  Vector out(x.size());
  if (dyn.polynomial()) {
    PolynomialKernel(*dyn.polynomial()).diffusion(x, out);
    check_finite(out, "diffusion");
    return out;
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = dyn.diffusion(i, x(i));
  check_finite(out, "diffusion");
  return out;
}

}  // namespace stochnet
