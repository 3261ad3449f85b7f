#include "amplab/stats/pls.hpp"

#include <cmath>

#include "amplab/core/error.hpp"

namespace amplab::stats {

PlsModel pls1_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    throw ShapeError("pls1_fit: X has " + std::to_string(x.rows()) + " rows, y has " +
                     std::to_string(y.size()));
  }
  if (x.rows() < 2 || x.cols() < 1) throw ShapeError("pls1_fit needs >= 2 rows and >= 1 column");
  PlsModel m;
  m.x_mean = x.colwise().mean().transpose();
  m.y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - m.x_mean.transpose();
  const Eigen::VectorXd yc = y.array() - m.y_mean;
  const double yss = yc.squaredNorm();
  if (!(yss > 0.0)) throw DegenerateError("pls1_fit: response has zero variance");

  const Eigen::VectorXd cov = xc.transpose() * yc;
  const double cov_norm = cov.norm();
  const double scale = xc.norm() * std::sqrt(yss);
  if (cov_norm > 1e-14 * scale) {
    m.x_weights = cov / cov_norm;
  } else {
    m.x_weights = Eigen::VectorXd::Unit(x.cols(), 0);
  }
  m.scores = xc * m.x_weights;
  const double tt = m.scores.squaredNorm();
  if (tt > 0.0) {
    m.x_loadings = xc.transpose() * m.scores / tt;
    m.y_loading = yc.dot(m.scores) / tt;
  } else {
    m.x_loadings = Eigen::VectorXd::Zero(x.cols());
    m.y_loading = 0.0;
  }
  const double rss = (yc - m.scores * m.y_loading).squaredNorm();
  m.r_squared = 1.0 - rss / yss;
  return m;
}

Eigen::VectorXd predict(const PlsModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.x_mean.size()) {
    throw ShapeError("pls predict: expected " + std::to_string(model.x_mean.size()) + " columns");
  }
  const Eigen::VectorXd t = (x.rowwise() - model.x_mean.transpose()) * model.x_weights;
  return (t * model.y_loading).array() + model.y_mean;
}

}  // namespace amplab::stats
