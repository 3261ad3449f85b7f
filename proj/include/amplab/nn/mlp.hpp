#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "amplab/data/dataset.hpp"

namespace amplab::nn {

enum class Activation { relu, tanh, softplus };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden_widths;  // depth = hidden_widths.size()
  int output_dim = 2;
  Activation activation = Activation::relu;
  // Fixed standardization of the inputs, fitted once on the training split.
  bool input_batchnorm = true;

  // Throws InvalidSpecError.
  void validate() const;

  bool operator==(const MlpSpec&) const = default;
};

// One-line text form, e.g. "in=2 hidden=64,64 out=2 act=relu bn=1"
// (hidden=- for no hidden layer). Parsing throws InvalidSpecError.
std::string spec_to_string(const MlpSpec& spec);
MlpSpec spec_from_string(std::string_view text);

// Closed-form number of trainable parameters.
std::size_t parameter_count(const MlpSpec& spec);

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// Parameter container; gradients and momentum buffers share the layout.
struct Parameters {
  std::vector<Layer> layers;

  std::size_t size() const;
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
  Parameters zeros_like() const;
  // this += a * other
  void axpy(double a, const Parameters& other);
  void scale(double a);
};

// x' = (x - shift) .* scale. Empty vectors mean identity.
struct InputTransform {
  Eigen::VectorXd shift;
  Eigen::VectorXd scale;

  bool identity() const { return shift.size() == 0; }
  // Mean / inverse standard deviation of each column; constant columns get scale 1.
  static InputTransform standardize(const RowMatrix& x);
};

struct Mlp {
  MlpSpec spec;
  Parameters params;
  std::uint64_t seed = 0;
  InputTransform input;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases, layer by layer.
Mlp init_mlp(const MlpSpec& spec, std::uint64_t seed);

// Logits, batch x output_dim.
Eigen::MatrixXd forward(const Mlp& mlp, const RowMatrix& x);

// Predicted class per row; ties go to the lowest class id.
std::vector<int> predict(const Mlp& mlp, const RowMatrix& x);

// Weighted mean of -log softmax(z)[y]. Empty `weights` means all ones.
double ce_loss(const Eigen::MatrixXd& logits, std::span<const int> labels,
               std::span<const double> weights = {});

// Gradient of ce_loss with respect to every parameter.
Parameters backward(const Mlp& mlp, const RowMatrix& x, std::span<const int> labels,
                    std::span<const double> weights = {});

// ce_loss and its gradient from one forward pass.
double loss_and_gradient(const Mlp& mlp, const RowMatrix& x, std::span<const int> labels,
                         std::span<const double> weights, Parameters& grad);

// Reduction of the logit vector to the scalar whose input gradient is penalized.
//   margin: z[1] - z[0]
//   softmax_weighted: sum_k p_k z_k with p = softmax(z) treated as constant
//   automatic: margin for two outputs, softmax_weighted otherwise
enum class Scalarization { automatic, margin, softmax_weighted };

// d f(x) / d x per row, same shape as x.
RowMatrix input_gradient(const Mlp& mlp, const RowMatrix& x,
                         Scalarization s = Scalarization::automatic);

// Batch mean of lambda * (||grad_x f(x)||_2 - c)^2.
double grad_penalty_value(const Mlp& mlp, const RowMatrix& x, double lambda, double c,
                          Scalarization s = Scalarization::automatic);

enum class PenaltyMode { exact, finite_difference };

// Parameter gradient of grad_penalty_value. Exact mode is double
// backpropagation and rejects relu; finite_difference is an approximate
// fallback usable with any activation (cost grows with parameter count).
Parameters grad_penalty_backward(const Mlp& mlp, const RowMatrix& x, double lambda, double c,
                                 PenaltyMode mode = PenaltyMode::exact,
                                 Scalarization s = Scalarization::automatic);

namespace detail {

// Column-per-sample activations of one forward pass.
struct Trace {
  std::vector<Eigen::MatrixXd> inputs;  // inputs[k] feeds layer k; inputs[0] is the transformed x
  std::vector<Eigen::MatrixXd> pre;     // pre[k] = W_k inputs[k] + b_k
};

Trace forward_trace(const Mlp& mlp, const RowMatrix& x);
Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z);
Eigen::MatrixXd activate_grad(Activation a, const Eigen::MatrixXd& z);
Eigen::MatrixXd activate_second(Activation a, const Eigen::MatrixXd& z);
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& z);
void check_input(const Mlp& mlp, const RowMatrix& x);

// d f / d logits per column (output_dim x batch). Softmax weights are the
// probabilities at the given parameters and are treated as constants.
Eigen::MatrixXd scalarization_weights(const Mlp& mlp, const RowMatrix& x, Scalarization s);
// Penalty with the scalarization weights held fixed; exact mode
// differentiates this function.
double grad_penalty_value_frozen(const Mlp& mlp, const RowMatrix& x, double lambda, double c,
                                 const Eigen::MatrixXd& weights);

}  // namespace detail

}  // namespace amplab::nn
