// Input gradients of the scalarized network output and the Lipschitz-style
// penalty lambda * (||grad_x f||_2 - c)^2 built on them.

#include <cmath>

#include "amplab/core/error.hpp"
#include "amplab/nn/mlp.hpp"

namespace amplab::nn {

namespace {

// Backward chain of the input gradient. dfda[k] = d f / d inputs[k],
// delta[k] = d f / d pre[k].
struct InputGradTrace {
  std::vector<Eigen::MatrixXd> dfda;
  std::vector<Eigen::MatrixXd> delta;
  Eigen::MatrixXd u;  // d f / d x, column per sample
};

InputGradTrace input_grad_trace(const Mlp& mlp, const detail::Trace& trace,
                                const Eigen::MatrixXd& weights) {
  const std::size_t depth = mlp.params.layers.size();
  InputGradTrace g;
  g.dfda.resize(depth);
  g.delta.resize(depth);
  g.delta[depth - 1] = weights;
  for (std::size_t k = depth; k-- > 0;) {
    g.dfda[k] = mlp.params.layers[k].weight.transpose() * g.delta[k];
    if (k > 0) {
      g.delta[k - 1] =
          g.dfda[k].cwiseProduct(detail::activate_grad(mlp.spec.activation, trace.pre[k - 1]));
    }
  }
  g.u = g.dfda[0];
  if (!mlp.input.identity()) g.u = mlp.input.scale.asDiagonal() * g.u;
  return g;
}

Eigen::MatrixXd weights_from_logits(const Mlp& mlp, const Eigen::MatrixXd& logits,
                                    Scalarization s) {
  if (s == Scalarization::automatic) {
    s = mlp.spec.output_dim == 2 ? Scalarization::margin : Scalarization::softmax_weighted;
  }
  if (s == Scalarization::margin) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());
    c.row(0).setConstant(-1.0);
    c.row(1).setConstant(1.0);
    return c;
  }
  return detail::softmax_columns(logits);
}

double penalty_from_u(const Eigen::MatrixXd& u, double lambda, double c) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const double gap = u.col(j).norm() - c;
    total += gap * gap;
  }
  return lambda * total / static_cast<double>(u.cols());
}

}  // namespace

namespace detail {

Eigen::MatrixXd scalarization_weights(const Mlp& mlp, const RowMatrix& x, Scalarization s) {
  return weights_from_logits(mlp, forward_trace(mlp, x).pre.back(), s);
}

double grad_penalty_value_frozen(const Mlp& mlp, const RowMatrix& x, double lambda, double c,
                                 const Eigen::MatrixXd& weights) {
  const auto trace = forward_trace(mlp, x);
  return penalty_from_u(input_grad_trace(mlp, trace, weights).u, lambda, c);
}

}  // namespace detail

RowMatrix input_gradient(const Mlp& mlp, const RowMatrix& x, Scalarization s) {
  const auto trace = detail::forward_trace(mlp, x);
  return input_grad_trace(mlp, trace, weights_from_logits(mlp, trace.pre.back(), s)).u.transpose();
}

double grad_penalty_value(const Mlp& mlp, const RowMatrix& x, double lambda, double c,
                          Scalarization s) {
  if (lambda < 0.0) throw InvalidParameterError("penalty lambda must be >= 0");
  if (x.rows() == 0) throw EmptyDataError("grad_penalty_value: empty batch");
  if (lambda == 0.0) {
    detail::check_input(mlp, x);
    return 0.0;
  }
  const auto trace = detail::forward_trace(mlp, x);
  const auto w = weights_from_logits(mlp, trace.pre.back(), s);
  return penalty_from_u(input_grad_trace(mlp, trace, w).u, lambda, c);
}

namespace {

Parameters penalty_backward_exact(const Mlp& mlp, const RowMatrix& x, double lambda, double c,
                                  Scalarization s) {
  const std::size_t depth = mlp.params.layers.size();
  const Activation act = mlp.spec.activation;
  const auto trace = detail::forward_trace(mlp, x);
  const auto g = input_grad_trace(mlp, trace, weights_from_logits(mlp, trace.pre.back(), s));
  const auto batch = static_cast<double>(x.rows());

  // Adjoint of u.
  Eigen::MatrixXd ubar(g.u.rows(), g.u.cols());
  for (Eigen::Index j = 0; j < g.u.cols(); ++j) {
    const double norm = g.u.col(j).norm();
    ubar.col(j) = norm > 0.0
                      ? Eigen::VectorXd(g.u.col(j) * (2.0 * lambda * (norm - c) / (norm * batch)))
                      : Eigen::VectorXd::Zero(g.u.rows());
  }
  Eigen::MatrixXd hbar = mlp.input.identity() ? ubar : mlp.input.scale.asDiagonal() * ubar;

  Parameters grad = mlp.params.zeros_like();
  // Direct adjoints of the pre-activations through the activation derivatives.
  std::vector<Eigen::MatrixXd> zbar(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    // dfda[k] = W_k^T delta[k]
    grad.layers[k].weight.noalias() += g.delta[k] * hbar.transpose();
    if (k + 1 == depth) break;  // delta[depth-1] is the detached scalarization
    const Eigen::MatrixXd dbar = mlp.params.layers[k].weight * hbar;
    // delta[k] = sigma'(pre[k]) .* dfda[k+1]
    zbar[k] = detail::activate_second(act, trace.pre[k]).cwiseProduct(g.dfda[k + 1]).cwiseProduct(dbar);
    hbar = detail::activate_grad(act, trace.pre[k]).cwiseProduct(dbar);
  }

  // Push the pre-activation adjoints back through the forward pass.
  Eigen::MatrixXd carry;
  for (std::size_t k = depth - 1; k-- > 0;) {
    Eigen::MatrixXd total = zbar[k];
    if (carry.size() != 0) total += carry;
    grad.layers[k].weight.noalias() += total * trace.inputs[k].transpose();
    grad.layers[k].bias += total.rowwise().sum();
    if (k > 0) {
      carry = (mlp.params.layers[k].weight.transpose() * total)
                  .cwiseProduct(detail::activate_grad(act, trace.pre[k - 1]));
    }
  }
  return grad;
}

Parameters penalty_backward_fd(const Mlp& mlp, const RowMatrix& x, double lambda, double c,
                               Scalarization s) {
  constexpr double h = 1e-5;
  // Scalarization weights stay frozen at the unperturbed parameters, as in exact mode.
  const Eigen::MatrixXd weights = detail::scalarization_weights(mlp, x, s);
  Mlp probe = mlp;
  const Eigen::VectorXd theta = mlp.params.flatten();
  Eigen::VectorXd out(theta.size());
  Eigen::VectorXd shifted = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    shifted(i) = theta(i) + h;
    probe.params.assign(shifted);
    const double up = detail::grad_penalty_value_frozen(probe, x, lambda, c, weights);
    shifted(i) = theta(i) - h;
    probe.params.assign(shifted);
    const double down = detail::grad_penalty_value_frozen(probe, x, lambda, c, weights);
    shifted(i) = theta(i);
    out(i) = (up - down) / (2.0 * h);
  }
  Parameters grad = mlp.params.zeros_like();
  grad.assign(out);
  return grad;
}

}  // namespace

Parameters grad_penalty_backward(const Mlp& mlp, const RowMatrix& x, double lambda, double c,
                                 PenaltyMode mode, Scalarization s) {
  if (lambda < 0.0) throw InvalidParameterError("penalty lambda must be >= 0");
  detail::check_input(mlp, x);
  if (x.rows() == 0) throw EmptyDataError("grad_penalty_backward: empty batch");
  if (mode == PenaltyMode::exact && mlp.spec.activation == Activation::relu) {
    throw UnsupportedActivationError(
        "exact gradient-penalty differentiation needs a twice-differentiable activation "
        "(tanh or softplus); relu's second derivative is zero almost everywhere. "
        "Use the finite_difference penalty mode for relu networks.");
  }
  if (lambda == 0.0) return mlp.params.zeros_like();
  return mode == PenaltyMode::exact ? penalty_backward_exact(mlp, x, lambda, c, s)
                                    : penalty_backward_fd(mlp, x, lambda, c, s);
}

}  // namespace amplab::nn
