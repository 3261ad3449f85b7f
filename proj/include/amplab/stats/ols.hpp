#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "amplab/stats/design.hpp"

namespace amplab::stats {

// Columns whose Householder pivot falls below this fraction of the largest
// pivot count as linearly dependent.
inline constexpr double kRankTolerance = 1e-10;

struct RegressionResult {
  std::vector<std::string> names;  // "intercept" first when fitted with one
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  double r_squared = 0.0;
  Eigen::VectorXd residuals;
  Eigen::VectorXd fitted;
  std::size_t n = 0;
  std::size_t p = 0;  // number of fitted coefficients, intercept included
  bool has_intercept = false;

  double coefficient(const std::string& name) const;
  double standard_error(const std::string& name) const;
};

// Least squares via Householder QR. Standard errors come from
// sigma^2 (X^T X)^-1 with sigma^2 = RSS / (n - p). R^2 uses the centred
// total sum of squares with an intercept and the raw sum of squares
// without one; a zero total sum of squares gives R^2 = 1.
//
// Throws DegreesOfFreedomError when n <= p and SingularDesignError (with
// the dependent column names) when X is rank deficient.
RegressionResult ols_fit(const DesignMatrix& x, std::span<const double> y, bool intercept);

// Throws SchemaError if the column names differ from the fitted ones.
Eigen::VectorXd predict(const RegressionResult& fit, const DesignMatrix& x);

}  // namespace amplab::stats
