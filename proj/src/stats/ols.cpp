#include "amplab/stats/ols.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "amplab/core/error.hpp"

namespace amplab::stats {

namespace {

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw SchemaError("regression has no coefficient '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

Eigen::MatrixXd with_intercept(const DesignMatrix& x, bool intercept) {
  const Eigen::MatrixXd raw = x.matrix();
  if (!intercept) return raw;
  Eigen::MatrixXd m(raw.rows(), raw.cols() + 1);
  m.col(0).setOnes();
  m.rightCols(raw.cols()) = raw;
  return m;
}

}  // namespace

double RegressionResult::coefficient(const std::string& name) const {
  return coefficients(static_cast<Eigen::Index>(index_of(names, name)));
}

double RegressionResult::standard_error(const std::string& name) const {
  return standard_errors(static_cast<Eigen::Index>(index_of(names, name)));
}

RegressionResult ols_fit(const DesignMatrix& x, std::span<const double> y, bool intercept) {
  if (x.cols() == 0 && !intercept) throw SchemaError("ols_fit: design matrix has no columns");
  if (x.rows() != y.size()) {
    throw ShapeError("ols_fit: design has " + std::to_string(x.rows()) + " rows, response has " +
                     std::to_string(y.size()));
  }
  RegressionResult r;
  r.has_intercept = intercept;
  if (intercept) r.names.push_back("intercept");
  r.names.insert(r.names.end(), x.names().begin(), x.names().end());
  r.n = y.size();
  r.p = r.names.size();
  if (r.n <= r.p) {
    throw DegreesOfFreedomError("ols_fit: " + std::to_string(r.n) + " rows for " +
                                std::to_string(r.p) + " coefficients; need more rows than coefficients");
  }

  const Eigen::MatrixXd X = with_intercept(x, intercept);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  const auto p = static_cast<Eigen::Index>(r.p);
  const Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();

  const double largest = R.diagonal().cwiseAbs().maxCoeff();
  std::vector<std::string> dependent;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(std::abs(R(j, j)) > kRankTolerance * largest)) {
      dependent.push_back(r.names[static_cast<std::size_t>(j)]);
    }
  }
  if (!dependent.empty()) {
    std::string list;
    for (const auto& d : dependent) list += (list.empty() ? "" : ", ") + d;
    throw SingularDesignError("ols_fit: design matrix is rank deficient; column(s) " + list +
                                  " are linear combinations of earlier columns",
                              dependent);
  }

  const Eigen::VectorXd qty = qr.householderQ().transpose() * yv;
  r.coefficients = R.triangularView<Eigen::Upper>().solve(qty.head(p));
  r.fitted = X * r.coefficients;
  r.residuals = yv - r.fitted;

  const double rss = r.residuals.squaredNorm();
  const double sigma2 = rss / static_cast<double>(r.n - r.p);
  const Eigen::MatrixXd rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  r.standard_errors = ((rinv * rinv.transpose()).diagonal() * sigma2).cwiseSqrt();

  const double tss = intercept ? (yv.array() - yv.mean()).square().sum() : yv.squaredNorm();
  r.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  return r;
}

Eigen::VectorXd predict(const RegressionResult& fit, const DesignMatrix& x) {
  const std::size_t offset = fit.has_intercept ? 1 : 0;
  if (x.names().size() + offset != fit.names.size() ||
      !std::equal(x.names().begin(), x.names().end(), fit.names.begin() + static_cast<std::ptrdiff_t>(offset))) {
    throw SchemaError("predict: design columns do not match the fitted regression");
  }
  return with_intercept(x, fit.has_intercept) * fit.coefficients;
}

}  // namespace amplab::stats
