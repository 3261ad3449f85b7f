#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "../common/oracles.hpp"
#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"
#include "amplab/stats/design.hpp"
#include "amplab/stats/ols.hpp"
#include "amplab/stats/pls.hpp"

using namespace amplab;
using namespace amplab::stats;
using doctest::Approx;

namespace {

struct Problem {
  DesignMatrix x;
  std::vector<std::vector<double>> columns;
  std::vector<double> y;
};

Problem random_problem(Rng& rng, std::size_t n, std::size_t p) {
  Problem pr;
  pr.columns.assign(p, std::vector<double>(n));
  pr.y.resize(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (auto& v : pr.columns[j]) v = rng.normal();
    pr.x.add_column("x" + std::to_string(j), pr.columns[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    pr.y[i] = rng.normal();
    for (std::size_t j = 0; j < p; ++j) pr.y[i] += (1.0 + j) * pr.columns[j][i];
  }
  return pr;
}

double angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  // atan2 keeps precision for nearly parallel vectors, unlike acos.
  const Eigen::VectorXd ua = a.normalized(), ub = b.normalized();
  const double along = std::abs(ua.dot(ub));
  return std::atan2((ua - ua.dot(ub) * ub).norm(), along);
}

}  // namespace

TEST_CASE("DesignMatrix invariants") {
  DesignMatrix x;
  x.add_column("a", {1, 2, 3});
  CHECK_THROWS_AS(x.add_column("a", {1, 2, 3}), SchemaError);
  CHECK_THROWS_AS(x.add_column("b", {1, 2}), ShapeError);
  CHECK_THROWS_AS(x.add_column("c", {1, NAN, 3}), InvalidParameterError);
  CHECK(x.rows() == 3);
  CHECK(x.cols() == 1);
  CHECK(x.column("a")[2] == 3);
}

TEST_CASE("ols_fit examples") {
  SUBCASE("exact line through the origin") {
    DesignMatrix x;
    x.add_column("x", {1, 2, 3});
    const std::vector<double> y{2, 4, 6};
    const auto fit = ols_fit(x, y, false);
    CHECK(fit.coefficient("x") == Approx(2.0).epsilon(1e-14));
    CHECK(fit.r_squared == Approx(1.0));
  }
  SUBCASE("constant response with intercept") {
    DesignMatrix x;
    x.add_column("x", {1, 5, 2, 8});
    const std::vector<double> y{3, 3, 3, 3};
    const auto fit = ols_fit(x, y, true);
    CHECK(std::abs(fit.coefficient("x")) < 1e-12);
    CHECK(fit.coefficient("intercept") == Approx(3.0));
  }
  SUBCASE("6 points, 2 regressors, against the normal equations") {
    const std::vector<double> a{1, 2, 3, 4, 5, 6}, b{2, -1, 0, 3, 1, -2};
    const std::vector<double> y{1.5, 2.0, 4.1, 7.9, 7.2, 6.0};
    DesignMatrix x;
    x.add_column("a", a).add_column("b", b);
    const auto fit = ols_fit(x, y, false);
    const auto ref = testing::normal_equations({a, b}, y);
    CHECK(std::abs(fit.coefficient("a") - ref[0]) < 1e-10);
    CHECK(std::abs(fit.coefficient("b") - ref[1]) < 1e-10);
  }
}

TEST_CASE("ols_fit errors") {
  DesignMatrix x;
  x.add_column("a", {1, 2, 3}).add_column("b", {2, 4, 6});
  const std::vector<double> y{1, 2, 4};
  try {
    ols_fit(x, y, false);
    FAIL("expected SingularDesignError");
  } catch (const SingularDesignError& e) {
    CHECK(e.dependent_columns() == std::vector<std::string>{"b"});
  }
  CHECK_THROWS_AS(ols_fit(x, y, true), DegreesOfFreedomError);
  DesignMatrix one;
  one.add_column("a", {2});
  CHECK_THROWS_AS(ols_fit(one, std::vector<double>{1}, false), DegreesOfFreedomError);
  CHECK_THROWS_AS(ols_fit(one, std::vector<double>{1, 2, 3}, false), ShapeError);
}

TEST_CASE("ols_fit properties") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t p = 1 + rng.index(4);
    const std::size_t n = p + 3 + rng.index(20);
    const auto pr = random_problem(rng, n, p);
    const bool intercept = trial % 2 == 0;
    const auto fit = ols_fit(pr.x, pr.y, intercept);

    // Residuals orthogonal to every design column.
    const double scale = Eigen::Map<const Eigen::VectorXd>(pr.y.data(), static_cast<Eigen::Index>(n)).norm();
    for (const auto& col : pr.columns) {
      const Eigen::Map<const Eigen::VectorXd> c(col.data(), static_cast<Eigen::Index>(n));
      CHECK(std::abs(c.dot(fit.residuals)) < 1e-8 * scale * c.norm());
    }
    if (intercept) {
      CHECK(std::abs(fit.residuals.sum()) < 1e-8 * scale * std::sqrt(double(n)));
      CHECK(fit.r_squared >= 0.0);
      CHECK(fit.r_squared <= 1.0);
    }

    // Scale equivariance.
    std::vector<double> y3 = pr.y;
    for (auto& v : y3) v *= -3.0;
    const auto fit3 = ols_fit(pr.x, y3, intercept);
    CHECK(fit3.coefficients.isApprox(-3.0 * fit.coefficients, 1e-10));
    CHECK(fit3.r_squared == Approx(fit.r_squared).epsilon(1e-10));

    // Predict reproduces fitted values.
    CHECK(predict(fit, pr.x).isApprox(fit.fitted, 1e-12));
  }

  SUBCASE("single regressor R^2 equals squared correlation") {
    const auto pr = random_problem(rng, 25, 1);
    const auto fit = ols_fit(pr.x, pr.y, true);
    const Eigen::Map<const Eigen::VectorXd> x(pr.columns[0].data(), 25);
    const Eigen::Map<const Eigen::VectorXd> y(pr.y.data(), 25);
    const Eigen::VectorXd xc = x.array() - x.mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double r = xc.dot(yc) / (xc.norm() * yc.norm());
    CHECK(fit.r_squared == Approx(r * r).epsilon(1e-12));
  }

  SUBCASE("standard errors against sigma^2 (X^T X)^-1") {
    const auto pr = random_problem(rng, 15, 2);
    const auto fit = ols_fit(pr.x, pr.y, false);
    const Eigen::MatrixXd X = pr.x.matrix();
    const double sigma2 = fit.residuals.squaredNorm() / 13.0;
    const Eigen::MatrixXd cov = sigma2 * (X.transpose() * X).inverse();
    CHECK(fit.standard_error("x0") == Approx(std::sqrt(cov(0, 0))).epsilon(1e-10));
    CHECK(fit.standard_error("x1") == Approx(std::sqrt(cov(1, 1))).epsilon(1e-10));
  }
}

TEST_CASE("ols predict") {
  DesignMatrix x;
  x.add_column("a", {1, 2, 3, 4});
  const auto fit = ols_fit(x, std::vector<double>{3, 5, 6, 9}, true);
  DesignMatrix zero;
  zero.add_column("a", {0, 0});
  const auto out = predict(fit, zero);
  CHECK(out(0) == Approx(fit.coefficient("intercept")));
  CHECK(out(1) == Approx(fit.coefficient("intercept")));
  DesignMatrix other;
  other.add_column("b", {0, 0});
  CHECK_THROWS_AS(predict(fit, other), SchemaError);
}

TEST_CASE("pls1_fit") {
  SUBCASE("response equal to a centred column") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 1,
        -1, 1,
         1, -1,
        -1, -1;
    const Eigen::VectorXd y = x.col(0);
    const auto m = pls1_fit(x, y);
    CHECK(m.r_squared == Approx(1.0));
    CHECK(m.x_weights(0) == Approx(1.0));
    CHECK(std::abs(m.x_weights(1)) < 1e-12);
  }
  SUBCASE("no covariance") {
    Eigen::MatrixXd x(4, 1);
    x << 1, -1, 1, -1;
    Eigen::VectorXd y(4);
    y << 1, 1, -1, -1;
    CHECK(pls1_fit(x, y).r_squared == Approx(0.0));
  }
  SUBCASE("5x2 case against a grid search") {
    Eigen::MatrixXd x(5, 2);
    x << 1.0, 2.0,
         2.0, 1.5,
         3.0, 3.5,
         4.0, 3.0,
         5.0, 6.0;
    Eigen::VectorXd y(5);
    y << 1.1, 1.9, 3.2, 3.9, 5.3;
    const auto m = pls1_fit(x, y);
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    double best = -1.0;
    Eigen::Vector2d best_w;
    for (int k = 0; k < 200000; ++k) {
      const double th = std::numbers::pi * k / 200000.0;
      const Eigen::Vector2d w(std::cos(th), std::sin(th));
      const double cov = std::abs(yc.dot(xc * w));
      if (cov > best) {
        best = cov;
        best_w = w;
      }
    }
    CHECK(angle(m.x_weights, best_w) < 1e-3);
  }
  SUBCASE("weight parallel to X^T y, unit norm, predict at the mean") {
    Rng rng(4);
    Eigen::MatrixXd x(12, 4);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 4; ++j) x(i, j) = rng.normal();
      y(i) = x(i, 0) - 2 * x(i, 2) + 0.1 * rng.normal();
    }
    const auto m = pls1_fit(x, y);
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::VectorXd xty = xc.transpose() * (y.array() - y.mean()).matrix();
    CHECK(angle(m.x_weights, xty) < 1e-10);
    CHECK(m.x_weights.norm() == Approx(1.0));
    CHECK(predict(m, x.colwise().mean())(0) == Approx(y.mean()));
    // Deterministic.
    CHECK(pls1_fit(x, y).x_weights == m.x_weights);
  }
  SUBCASE("errors") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
    CHECK_THROWS_AS(pls1_fit(x, Eigen::VectorXd::Constant(4, 2.0)), DegenerateError);
    CHECK_THROWS_AS(pls1_fit(x, Eigen::VectorXd::Zero(3)), ShapeError);
  }
}
