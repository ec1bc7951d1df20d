#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "stochnet/approx.hpp"

using namespace stochnet;

namespace {

// Independent oracle: barycentric Lagrange interpolation at first-kind
// Chebyshev points, evaluated directly without any basis conversion.
double barycentric(const std::function<double(double)>& f, double a, double b, int degree, double x) {
  const int n = degree + 1;
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k < n; ++k) {
    const double theta = (2.0 * k + 1.0) * std::numbers::pi / (2.0 * n);
    const double node = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(theta);
    const double w = (k % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
    if (x == node) return f(node);
    const double t = w / (x - node);
    num += t * f(node);
    den += t;
  }
  return num / den;
}

double dense_max_error(const std::function<double(double)>& f, const std::function<double(double)>& p, double a,
                       double b) {
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double x = a + (b - a) * k / 999.0;
    worst = std::max(worst, std::abs(f(x) - p(x)));
  }
  return worst;
}

}  // namespace

TEST_CASE("1-D fit reproduces polynomials") {
  SUBCASE("x^2 on [0, 1]") {
    const auto fit = cheb_fit_1d([](double x) { return x * x; }, 0.0, 1.0, 2);
    REQUIRE(fit.mono_coeffs.size() == 3);
    CHECK(std::abs(fit.mono_coeffs(0)) < 1e-12);
    CHECK(std::abs(fit.mono_coeffs(1)) < 1e-12);
    CHECK(fit.mono_coeffs(2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.max_abs_error < 1e-10);
  }
  SUBCASE("constant") {
    const auto fit = cheb_fit_1d([](double) { return 7.0; }, -3.0, 5.0, 0);
    REQUIRE(fit.mono_coeffs.size() == 1);
    CHECK(fit.mono_coeffs(0) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(fit(1.234) == doctest::Approx(7.0));
  }
  SUBCASE("random polynomials up to the degree cap") {
    std::mt19937_64 rng(21);
    for (int deg = 0; deg <= kMaxDegree1D; ++deg) {
      const Eigen::VectorXd c = testutil::random_vector(deg + 1, rng);
      const auto fit = cheb_fit_1d([&](double x) { return polyval(c, x); }, 0.0, 1.0, deg);
      CHECK(fit.max_abs_error < 1e-13);
      // Monomial coefficients on [0, 1] are ill-conditioned; values are not.
      CHECK((fit.mono_coeffs - c).cwiseAbs().maxCoeff() < 1e-7);
    }
  }
  SUBCASE("shifted domain") {
    const auto fit = cheb_fit_1d([](double x) { return 2.0 - x + 0.5 * x * x * x; }, 1.0, 4.0, 3);
    CHECK(fit.mono_coeffs(0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.mono_coeffs(1) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(std::abs(fit.mono_coeffs(2)) < 1e-10);
    CHECK(fit.mono_coeffs(3) == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("1-D fit of exp matches an independent interpolant") {
  const auto f = [](double x) { return std::exp(x); };
  const auto fit = cheb_fit_1d(f, 0.0, 1.0, 8);
  const auto oracle = [&](double x) { return barycentric(f, 0.0, 1.0, 8, x); };
  const double oracle_error = dense_max_error(f, oracle, 0.0, 1.0);
  CHECK(oracle_error < 1e-8);
  CHECK(fit.max_abs_error <= oracle_error * 1.01 + 1e-14);
  for (int k = 0; k <= 50; ++k) {
    const double x = k / 50.0;
    CHECK(std::abs(fit(x) - oracle(x)) < 1e-13);
  }
}

TEST_CASE("error does not grow with degree for smooth functions") {
  for (const auto& f : {std::function<double(double)>([](double x) { return std::exp(x); }),
                        std::function<double(double)>([](double x) { return std::sin(x); })}) {
    double previous = cheb_fit_1d(f, 0.0, 1.0, 2).max_abs_error;
    for (int deg = 4; deg <= 10; deg += 2) {
      const double err = cheb_fit_1d(f, 0.0, 1.0, deg).max_abs_error;
      CHECK(err <= std::max(previous * 1.01, 1e-14));
      previous = err;
    }
  }
}

TEST_CASE("1-D fit preconditions") {
  const auto f = [](double x) { return x; };
  CHECK_THROWS_CODE(cheb_fit_1d(f, 0.0, 1.0, 13), ErrorCode::DegreeTooHigh);
  CHECK_NOTHROW(cheb_fit_1d(f, 0.0, 1.0, 12));
  CHECK_THROWS_CODE(cheb_fit_1d(f, 1.0, 1.0, 2), ErrorCode::InvalidParameter);
  CHECK_THROWS_CODE(cheb_fit_1d(f, 0.0, 1.0, -1), ErrorCode::InvalidParameter);
  CHECK_THROWS_CODE(cheb_fit_1d([](double x) { return 1.0 / (x - 0.5) / 0.0; }, 0.0, 1.0, 3),
                    ErrorCode::NonFiniteSample);
  CHECK_THROWS_CODE(cheb_fit_1d([](double x) { return std::log(x - 0.5); }, 0.0, 1.0, 4), ErrorCode::NonFiniteSample);
}

TEST_CASE("2-D fit") {
  SUBCASE("bilinear x y") {
    const auto fit = cheb_fit_2d([](double x, double y) { return x * y; }, 0.0, 1.0, 2, 2);
    REQUIRE(fit.d_pq.rows() == 2);
    REQUIRE(fit.d_pq.cols() == 2);
    CHECK(fit.d_pq(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(fit.d_pq(0, 0)) < 1e-12);
    CHECK(std::abs(fit.d_pq(0, 1)) < 1e-12);
    CHECK(std::abs(fit.d_pq(1, 0)) < 1e-12);
  }
  SUBCASE("ou coupling -y") {
    const auto fit = cheb_fit_2d([](double, double y) { return -y; }, 0.0, 1.0, 1, 2);
    REQUIRE(fit.d_pq.rows() == 1);
    REQUIRE(fit.d_pq.cols() == 2);
    CHECK(fit.d_pq(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(fit.d_pq(0, 0)) < 1e-12);
  }
  SUBCASE("sin(x) y") {
    const auto fit = cheb_fit_2d([](double x, double y) { return std::sin(x) * y; }, 0.0, 1.0, 6, 2);
    CHECK(fit.max_abs_error < 1e-6);
    CHECK(fit(0.3, 0.7) == doctest::Approx(std::sin(0.3) * 0.7).epsilon(1e-6));
  }
  SUBCASE("random tensor polynomials") {
    std::mt19937_64 rng(23);
    for (int p = 1; p <= 5; ++p) {
      for (int q = 1; q <= 5; ++q) {
        const Eigen::MatrixXd d = testutil::random_matrix(p, q, rng, -1.0, 1.0);
        const auto g = [&](double x, double y) {
          double acc = 0.0;
          for (int i = 0; i < p; ++i) {
            for (int j = 0; j < q; ++j) acc += d(i, j) * std::pow(x, i) * std::pow(y, j);
          }
          return acc;
        };
        const auto fit = cheb_fit_2d(g, 0.0, 1.0, p, q);
        CHECK(fit.max_abs_error < 1e-9);
        CHECK((fit.d_pq - d).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
  SUBCASE("preconditions") {
    const auto g = [](double x, double y) { return x + y; };
    CHECK_THROWS_CODE(cheb_fit_2d(g, 0.0, 1.0, 9, 2), ErrorCode::DegreeTooHigh);
    CHECK_THROWS_CODE(cheb_fit_2d(g, 0.0, 1.0, 2, 9), ErrorCode::DegreeTooHigh);
    CHECK_THROWS_CODE(cheb_fit_2d(g, 0.0, 1.0, 0, 2), ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(cheb_fit_2d(g, 2.0, 1.0, 2, 2), ErrorCode::InvalidParameter);
    CHECK_THROWS_CODE(cheb_fit_2d([](double, double) { return NAN; }, 0.0, 1.0, 2, 2), ErrorCode::NonFiniteSample);
  }
}

TEST_CASE("coupling collapse") {
  Eigen::MatrixXd glv = Eigen::MatrixXd::Zero(2, 2);
  glv(1, 1) = 1.0;
  CHECK(collapse_coupling(glv) == (Eigen::VectorXd(3) << 0, 0, 1).finished());

  Eigen::MatrixXd ou = Eigen::MatrixXd::Zero(1, 2);
  ou(0, 1) = -1.0;
  CHECK(collapse_coupling(ou) == (Eigen::VectorXd(2) << 0, -1).finished());

  Eigen::MatrixXd d(2, 2);
  d << 1, 2, 3, 4;
  CHECK(collapse_coupling(d) == (Eigen::VectorXd(3) << 1, 5, 4).finished());

  SUBCASE("brute force: solve for the quadratic through five samples of g(x, x)") {
    Eigen::MatrixXd v(5, 3);
    Eigen::VectorXd rhs(5);
    for (int k = 0; k < 5; ++k) {
      const double x = -1.0 + 0.5 * k;
      v(k, 0) = 1.0;
      v(k, 1) = x;
      v(k, 2) = x * x;
      rhs(k) = 1 + 2 * x + 3 * x + 4 * x * x;
    }
    const Eigen::VectorXd c = v.colPivHouseholderQr().solve(rhs);
    CHECK((c - collapse_coupling(d)).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("diagonal consistency of fitted functions") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto fit = cheb_fit_2d([](double x, double y) { return std::exp(x) * std::cos(y); }, 0.0, 1.0, 5, 4);
    const auto c = collapse_coupling(fit.d_pq);
    for (int k = 0; k < 50; ++k) {
      const double z = u(rng);
      CHECK(std::abs(polyval(c, z) - fit(z, z)) < 1e-9);
    }
  }
}

TEST_CASE("chebyshev to monomial") {
  const auto m = chebyshev_to_monomial(5);
  // T_4(t) = 8t^4 - 8t^2 + 1
  CHECK(m(0, 4) == 1.0);
  CHECK(m(2, 4) == -8.0);
  CHECK(m(4, 4) == 8.0);
  CHECK(m(1, 1) == 1.0);
  CHECK(polyval(Eigen::VectorXd::Zero(0), 3.0) == 0.0);
  CHECK(polyval((Eigen::VectorXd(3) << 1, 2, 3).finished(), 2.0) == 17.0);
}
