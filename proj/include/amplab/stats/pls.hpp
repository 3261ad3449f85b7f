#pragma once

#include <Eigen/Core>

namespace amplab::stats {

// Single-component PLS1 model (one response).
struct PlsModel {
  Eigen::VectorXd x_weights;   // unit norm, proportional to Xc^T yc
  Eigen::VectorXd x_loadings;  // Xc^T t / (t^T t)
  double y_loading = 0.0;      // yc^T t / (t^T t)
  Eigen::VectorXd x_mean;
  double y_mean = 0.0;
  Eigen::VectorXd scores;      // t = Xc w on the training rows
  double r_squared = 0.0;      // of y on the one-dimensional projection
};

// Centres X and y, takes w = Xc^T yc / ||Xc^T yc||, t = Xc w. When y has
// no covariance with any column the first axis is used and R^2 is 0.
// Throws DegenerateError for a constant response and ShapeError on a
// row-count mismatch.
PlsModel pls1_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

Eigen::VectorXd predict(const PlsModel& model, const Eigen::MatrixXd& x);

}  // namespace amplab::stats
