// Central finite-difference oracles shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "amplab/core/random.hpp"
#include "amplab/nn/mlp.hpp"

namespace amplab::testing {

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   Eigen::VectorXd theta, double h) {
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double t = theta(i);
    theta(i) = t + h;
    const double up = f(theta);
    theta(i) = t - h;
    const double down = f(theta);
    theta(i) = t;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||), 0 when both vanish.
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline RowMatrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  RowMatrix x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = scale * rng.normal();
  }
  return x;
}

// Small random network; the input transform is randomized too so the
// chain rule through it is exercised.
inline nn::Mlp random_net(Rng& rng, nn::Activation act, int outputs = 0) {
  nn::MlpSpec spec;
  spec.input_dim = 1 + static_cast<int>(rng.index(4));
  const auto depth = 1 + rng.index(2);
  for (std::size_t d = 0; d < depth; ++d) spec.hidden_widths.push_back(2 + static_cast<int>(rng.index(5)));
  spec.output_dim = outputs > 0 ? outputs : 2 + static_cast<int>(rng.index(3));
  spec.activation = act;
  spec.input_batchnorm = true;
  nn::Mlp mlp = nn::init_mlp(spec, rng.next());
  mlp.input.shift = Eigen::VectorXd(spec.input_dim);
  mlp.input.scale = Eigen::VectorXd(spec.input_dim);
  for (int j = 0; j < spec.input_dim; ++j) {
    mlp.input.shift(j) = 0.3 * rng.normal();
    mlp.input.scale(j) = rng.uniform(0.5, 1.5);
  }
  return mlp;
}

inline std::vector<int> random_labels(Rng& rng, std::size_t n, int classes) {
  std::vector<int> y(n);
  for (auto& v : y) v = static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
  return y;
}

// Relative error of backward() against central differences of ce_loss.
inline double backprop_error(const nn::Mlp& mlp, const RowMatrix& x, const std::vector<int>& y,
                             const std::vector<double>& w) {
  const Eigen::VectorXd analytic = nn::backward(mlp, x, y, w).flatten();
  nn::Mlp probe = mlp;
  const auto f = [&](const Eigen::VectorXd& theta) {
    probe.params.assign(theta);
    return nn::ce_loss(nn::forward(probe, x), y, w);
  };
  return relative_error(analytic, fd_gradient(f, mlp.params.flatten(), 1e-6));
}

// Relative error of exact penalty double backprop against central
// differences. Binary nets difference grad_penalty_value itself; with more
// outputs the softmax scalarization weights are frozen, matching the
// detached-probability definition.
inline double penalty_error(const nn::Mlp& mlp, const RowMatrix& x, double lambda, double c) {
  const Eigen::VectorXd analytic =
      nn::grad_penalty_backward(mlp, x, lambda, c, nn::PenaltyMode::exact).flatten();
  const Eigen::MatrixXd frozen =
      nn::detail::scalarization_weights(mlp, x, nn::Scalarization::automatic);
  nn::Mlp probe = mlp;
  const auto f = [&](const Eigen::VectorXd& theta) {
    probe.params.assign(theta);
    return mlp.spec.output_dim == 2 ? nn::grad_penalty_value(probe, x, lambda, c)
                                    : nn::detail::grad_penalty_value_frozen(probe, x, lambda, c, frozen);
  };
  return relative_error(analytic, fd_gradient(f, mlp.params.flatten(), 1e-5));
}

}  // namespace amplab::testing
