#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "stochnet/models.hpp"

using namespace stochnet;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

}  // namespace

TEST_CASE("stochastic strength must be nonnegative") {
  CHECK_THROWS_CODE(StochasticStrength(-0.1), ErrorCode::InvalidParameter);
  CHECK_THROWS_CODE(StochasticStrength(NAN), ErrorCode::InvalidParameter);
  CHECK(StochasticStrength(0.0).epsilon == 0.0);
}

TEST_CASE("ou model") {
  const auto dyn = ou_model(2, StochasticStrength(0.5));
  const NetworkMatrix a(mat2(0, 1, 1, 0));
  CHECK(full_drift(dyn, a, vec2(1, 1)) == vec2(-1, -1));
  CHECK(full_drift(dyn, NetworkMatrix(mat2(0, 1, 2, 0)), vec2(1, 2)) == vec2(-2, -2));
  CHECK(full_diffusion(dyn, vec2(3, -7)) == vec2(0.5, 0.5));
  CHECK(dyn.coupling(0, 5.0, 2.0) == -2.0);
  CHECK(dyn.coupling(1, -5.0, 2.0) == -2.0);
  CHECK(full_diffusion(ou_model(2, StochasticStrength(0.0)), vec2(1, 2)).isZero(0.0));
  CHECK_FALSE(dyn.nonnegative_state());

  SUBCASE("drift is -A x for random networks") {
    std::mt19937_64 rng(2);
    const auto d = ou_model(30, StochasticStrength(1.0));
    for (int trial = 0; trial < 10; ++trial) {
      const NetworkMatrix w(testutil::random_matrix(30, 30, rng, -1.0, 1.0));
      const Vector x = testutil::random_vector(30, rng);
      const Vector expected = -(w.weights() * x);
      CHECK((full_drift(d, w, x) - expected).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("glv model") {
  const auto dyn = glv_model(Vector::Ones(2), StochasticStrength(0.2));
  CHECK(dyn.nonnegative_state());
  CHECK(dyn.self(0, 2.0) == 2.0);
  // A_ij x_i x_j with A_ij = -0.5, x_i = 2, x_j = 3.
  CHECK(-0.5 * dyn.coupling(0, 2.0, 3.0) == -3.0);
  CHECK(full_diffusion(dyn, vec2(1, 2)) == vec2(0.2, 0.4));
  CHECK(full_diffusion(dyn, Vector::Zero(2)).isZero(0.0));
  CHECK(dyn.self(1, 0.0) == 0.0);

  SUBCASE("fixed point of the single-species model") {
    const auto one = glv_model(Vector::Ones(1), StochasticStrength(0.0));
    const NetworkMatrix a(Matrix::Constant(1, 1, -1.0));
    CHECK(full_drift(one, a, Vector::Ones(1))(0) == doctest::Approx(0.0));
  }

  SUBCASE("extinct species have zero drift") {
    std::mt19937_64 rng(4);
    const Vector alpha = testutil::random_vector(12, rng, 0.5, 1.5);
    const auto d = glv_model(alpha, StochasticStrength(0.3));
    const NetworkMatrix w(testutil::random_matrix(12, 12, rng, -1.0, 1.0));
    Vector x = testutil::random_vector(12, rng, 0.0, 2.0);
    x(3) = 0.0;
    x(7) = 0.0;
    const Vector f = full_drift(d, w, x);
    CHECK(f(3) == 0.0);
    CHECK(f(7) == 0.0);
  }
}

TEST_CASE("drift with no coupling is the self term") {
  std::mt19937_64 rng(6);
  const Vector alpha = testutil::random_vector(5, rng);
  const auto d = glv_model(alpha, StochasticStrength(0.1));
  const Vector x = testutil::random_vector(5, rng, 0.0, 1.0);
  const Vector f = full_drift(d, NetworkMatrix(Matrix::Zero(5, 5)), x);
  CHECK((f - alpha.cwiseProduct(x)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("separable and pairwise drift agree") {
  std::mt19937_64 rng(10);
  const Eigen::Index n = 9;
  std::vector<Matrix> dpq;
  for (Eigen::Index i = 0; i < n; ++i) dpq.push_back(testutil::random_matrix(3, 4, rng, -1.0, 1.0));
  const CoefficientModel coef(testutil::random_matrix(n, 3, rng, -1.0, 1.0), dpq,
                              testutil::random_matrix(n, 2, rng, -1.0, 1.0));
  const auto dyn = NodeDynamics::from_coefficients(coef);
  const NetworkMatrix a(testutil::random_matrix(n, n, rng, -1.0, 1.0));
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = testutil::random_vector(n, rng, -1.5, 1.5);
    const Vector fast = full_drift(dyn, a, x);
    const Vector slow = full_drift_pairwise(dyn, a, x);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("coefficient model evaluation round trip") {
  // F(x) = 1 - 2x + 3x^2, G(x, y) = x y^2 - y, H(x) = 0.5 + x
  Vector b(3);
  b << 1, -2, 3;
  Matrix g = Matrix::Zero(2, 3);
  g(1, 2) = 1.0;
  g(0, 1) = -1.0;
  Vector h(2);
  h << 0.5, 1.0;
  const auto coef = CoefficientModel::homogeneous(4, b, g, h);
  const NodeDynamics reference({4, [](double x) { return 1 - 2 * x + 3 * x * x; }},
                               {4, [](double x, double y) { return x * y * y - y; }},
                               {4, [](double x) { return 0.5 + x; }});
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double x = u(rng);
    const double y = u(rng);
    const auto i = static_cast<Eigen::Index>(k % 4);
    CHECK(coef.eval_self(i, x) == doctest::Approx(reference.self(i, x)).epsilon(1e-14));
    CHECK(coef.eval_coupling(i, x, y) == doctest::Approx(reference.coupling(i, x, y)).epsilon(1e-14));
    CHECK(coef.eval_diffusion(i, x) == doctest::Approx(reference.diffusion(i, x)).epsilon(1e-14));
  }
  const Matrix c = coef.collapsed_coupling();
  CHECK(c.cols() == 4);
  CHECK(c(0, 1) == -1.0);
  CHECK(c(0, 3) == 1.0);
}

TEST_CASE("coefficient model validation") {
  CHECK_THROWS_CODE(CoefficientModel(Matrix::Zero(2, 1), {Matrix::Zero(1, 1)}, Matrix::Zero(2, 1)),
                    ErrorCode::DimensionMismatch);
  CHECK_THROWS_CODE(CoefficientModel(Matrix::Zero(1, 0), {Matrix::Zero(1, 1)}, Matrix::Zero(1, 1)),
                    ErrorCode::InvalidParameter);
  CHECK_THROWS_CODE(CoefficientModel(Matrix::Zero(2, 1), {Matrix::Zero(1, 1), Matrix::Zero(2, 1)}, Matrix::Zero(2, 1)),
                    ErrorCode::DimensionMismatch);
  Matrix bad = Matrix::Zero(1, 1);
  bad(0, 0) = INFINITY;
  CHECK_THROWS_CODE(CoefficientModel(bad, {Matrix::Zero(1, 1)}, Matrix::Zero(1, 1)), ErrorCode::InvalidParameter);
}

TEST_CASE("non-finite drift is reported") {
  const auto dyn = glv_model(Vector::Ones(2), StochasticStrength(0.1));
  const NetworkMatrix a(mat2(0, 1e300, 1e300, 0));
  CHECK_THROWS_CODE(full_drift(dyn, a, vec2(1e300, 1e300)), ErrorCode::NonFiniteState);
  CHECK_THROWS_CODE(full_drift(dyn, a, Vector::Ones(3)), ErrorCode::DimensionMismatch);
}

TEST_CASE("growth rates") {
  const Vector alpha = draw_growth_rates(5000, 1.0, 3);
  CHECK(std::abs(alpha.mean() - 1.0) < 3.0 * (1.0 / 3.0) / std::sqrt(5000.0));
  CHECK(draw_growth_rates(5000, 1.0, 3) == alpha);
  const double sd = std::sqrt((alpha.array() - alpha.mean()).square().sum() / 4999.0);
  CHECK(sd == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}

TEST_CASE("permuted coefficient model follows the network permutation") {
  std::mt19937_64 rng(14);
  const Vector alpha = testutil::random_vector(6, rng);
  const auto coef = glv_coefficients(alpha, StochasticStrength(0.3));
  const std::vector<Eigen::Index> perm{3, 1, 5, 0, 2, 4};
  const auto p = coef.permuted(perm);
  for (Eigen::Index k = 0; k < 6; ++k) CHECK(p.self()(k, 1) == alpha(perm[static_cast<std::size_t>(k)]));
}
