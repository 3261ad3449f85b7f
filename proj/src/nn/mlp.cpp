#include "amplab/nn/mlp.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"

namespace amplab::nn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::softplus: return "softplus";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "softplus") return Activation::softplus;
  throw InvalidSpecError("unknown activation '" + std::string(name) + "'");
}

void MlpSpec::validate() const {
  if (input_dim < 1) throw InvalidSpecError("input_dim must be >= 1");
  for (std::size_t i = 0; i < hidden_widths.size(); ++i) {
    if (hidden_widths[i] < 1) {
      throw InvalidSpecError("hidden layer " + std::to_string(i) + " has width " +
                             std::to_string(hidden_widths[i]));
    }
  }
  if (output_dim < 2) throw InvalidSpecError("output_dim must be >= 2 for classification");
}

std::string spec_to_string(const MlpSpec& spec) {
  std::string hidden;
  for (std::size_t i = 0; i < spec.hidden_widths.size(); ++i) {
    hidden += (i ? "," : "") + std::to_string(spec.hidden_widths[i]);
  }
  return "in=" + std::to_string(spec.input_dim) + " hidden=" + (hidden.empty() ? "-" : hidden) +
         " out=" + std::to_string(spec.output_dim) + " act=" + std::string(to_string(spec.activation)) +
         " bn=" + (spec.input_batchnorm ? "1" : "0");
}

MlpSpec spec_from_string(std::string_view text) {
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw InvalidSpecError("spec token without '=': " + token);
    if (!fields.emplace(token.substr(0, eq), token.substr(eq + 1)).second) {
      throw InvalidSpecError("duplicate spec field " + token.substr(0, eq));
    }
  }
  for (const char* key : {"in", "hidden", "out", "act", "bn"}) {
    if (!fields.count(key)) throw InvalidSpecError(std::string("spec is missing field ") + key);
  }
  if (fields.size() != 5) throw InvalidSpecError("spec has unknown fields");
  auto to_int = [](const std::string& v) {
    std::size_t used = 0;
    int out = 0;
    try {
      out = std::stoi(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) throw InvalidSpecError("bad integer in spec: " + v);
    return out;
  };
  MlpSpec spec;
  spec.input_dim = to_int(fields["in"]);
  spec.output_dim = to_int(fields["out"]);
  spec.activation = parse_activation(fields["act"]);
  if (fields["bn"] != "0" && fields["bn"] != "1") throw InvalidSpecError("bn must be 0 or 1");
  spec.input_batchnorm = fields["bn"] == "1";
  if (fields["hidden"] != "-") {
    std::istringstream hs(fields["hidden"]);
    std::string w;
    while (std::getline(hs, w, ',')) spec.hidden_widths.push_back(to_int(w));
  }
  spec.validate();
  return spec;
}

std::size_t parameter_count(const MlpSpec& spec) {
  std::size_t total = 0;
  std::size_t fan_in = static_cast<std::size_t>(spec.input_dim);
  for (int w : spec.hidden_widths) {
    total += fan_in * static_cast<std::size_t>(w) + static_cast<std::size_t>(w);
    fan_in = static_cast<std::size_t>(w);
  }
  return total + fan_in * static_cast<std::size_t>(spec.output_dim) +
         static_cast<std::size_t>(spec.output_dim);
}

std::size_t Parameters::size() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd Parameters::flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(size()));
  Eigen::Index pos = 0;
  for (const auto& l : layers) {
    flat.segment(pos, l.weight.size()) = l.weight.reshaped();
    pos += l.weight.size();
    flat.segment(pos, l.bias.size()) = l.bias;
    pos += l.bias.size();
  }
  return flat;
}

void Parameters::assign(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != size()) {
    throw ShapeError("Parameters::assign: expected " + std::to_string(size()) + " values, got " +
                     std::to_string(flat.size()));
  }
  Eigen::Index pos = 0;
  for (auto& l : layers) {
    l.weight.reshaped() = flat.segment(pos, l.weight.size());
    pos += l.weight.size();
    l.bias = flat.segment(pos, l.bias.size());
    pos += l.bias.size();
  }
}

Parameters Parameters::zeros_like() const {
  Parameters z;
  z.layers.reserve(layers.size());
  for (const auto& l : layers) {
    z.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  }
  return z;
}

void Parameters::axpy(double a, const Parameters& other) {
  for (std::size_t k = 0; k < layers.size(); ++k) {
    layers[k].weight += a * other.layers[k].weight;
    layers[k].bias += a * other.layers[k].bias;
  }
}

void Parameters::scale(double a) {
  for (auto& l : layers) {
    l.weight *= a;
    l.bias *= a;
  }
}

InputTransform InputTransform::standardize(const RowMatrix& x) {
  InputTransform t;
  const auto n = static_cast<double>(x.rows());
  t.shift = x.colwise().mean().transpose();
  t.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - t.shift(j)).square().sum() / n;
    t.scale(j) = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
  }
  return t;
}

Mlp init_mlp(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Mlp mlp;
  mlp.spec = spec;
  mlp.seed = seed;
  Rng rng(seed);
  int fan_in = spec.input_dim;
  auto add_layer = [&](int fan_out) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Layer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd(fan_out)};
    // Row-major fill order so the stream layout does not depend on Eigen storage.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    }
    for (int r = 0; r < fan_out; ++r) layer.bias(r) = rng.uniform(-bound, bound);
    mlp.params.layers.push_back(std::move(layer));
    fan_in = fan_out;
  };
  for (int w : spec.hidden_widths) add_layer(w);
  add_layer(spec.output_dim);
  return mlp;
}

namespace detail {

void check_input(const Mlp& mlp, const RowMatrix& x) {
  if (x.cols() != mlp.spec.input_dim) {
    throw ShapeError("input has " + std::to_string(x.cols()) + " columns, network expects " +
                     std::to_string(mlp.spec.input_dim));
  }
}

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::softplus:
      return z.unaryExpr([](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); });
  }
  return z;
}

namespace {
double sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}
}  // namespace

Eigen::MatrixXd activate_grad(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::relu: return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::tanh:
      return z.unaryExpr([](double v) {
        const double t = std::tanh(v);
        return 1.0 - t * t;
      });
    case Activation::softplus: return z.unaryExpr([](double v) { return sigmoid(v); });
  }
  return z;
}

Eigen::MatrixXd activate_second(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::relu: return Eigen::MatrixXd::Zero(z.rows(), z.cols());
    case Activation::tanh:
      return z.unaryExpr([](double v) {
        const double t = std::tanh(v);
        return -2.0 * t * (1.0 - t * t);
      });
    case Activation::softplus:
      return z.unaryExpr([](double v) {
        const double s = sigmoid(v);
        return s * (1.0 - s);
      });
  }
  return z;
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd p(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double m = z.col(j).maxCoeff();
    p.col(j) = (z.col(j).array() - m).exp().matrix();
    p.col(j) /= p.col(j).sum();
  }
  return p;
}

Trace forward_trace(const Mlp& mlp, const RowMatrix& x) {
  check_input(mlp, x);
  Trace t;
  const std::size_t depth = mlp.params.layers.size();
  t.inputs.reserve(depth);
  t.pre.reserve(depth);
  Eigen::MatrixXd a = x.transpose();
  if (!mlp.input.identity()) {
    a.colwise() -= mlp.input.shift;
    a = mlp.input.scale.asDiagonal() * a;
  }
  for (std::size_t k = 0; k < depth; ++k) {
    const Layer& layer = mlp.params.layers[k];
    Eigen::MatrixXd z = layer.weight * a;
    z.colwise() += layer.bias;
    t.inputs.push_back(std::move(a));
    if (k + 1 < depth) a = activate(mlp.spec.activation, z);
    t.pre.push_back(std::move(z));
  }
  return t;
}

}  // namespace detail

Eigen::MatrixXd forward(const Mlp& mlp, const RowMatrix& x) {
  auto trace = detail::forward_trace(mlp, x);
  return trace.pre.back().transpose();
}

std::vector<int> predict(const Mlp& mlp, const RowMatrix& x) {
  const Eigen::MatrixXd logits = forward(mlp, x);
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    int best = 0;
    for (Eigen::Index k = 1; k < logits.cols(); ++k) {
      if (logits(i, k) > logits(i, best)) best = static_cast<int>(k);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

namespace {

// Normalized weights w_i / sum(w); validates labels against `classes`.
Eigen::VectorXd normalized_weights(std::span<const int> labels, std::span<const double> weights,
                                   Eigen::Index rows, Eigen::Index classes) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) {
    throw ShapeError("expected " + std::to_string(rows) + " labels, got " +
                     std::to_string(labels.size()));
  }
  if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != rows) {
    throw ShapeError("expected " + std::to_string(rows) + " sample weights, got " +
                     std::to_string(weights.size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) {
      throw LabelError("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                       " outside [0, " + std::to_string(classes) + ")");
    }
  }
  Eigen::VectorXd w(rows);
  double total = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    w(i) = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
    if (!(w(i) >= 0.0)) throw InvalidParameterError("sample weights must be >= 0");
    total += w(i);
  }
  if (!(total > 0.0)) throw InvalidParameterError("sample weights are all zero");
  return w / total;
}

}  // namespace

double ce_loss(const Eigen::MatrixXd& logits, std::span<const int> labels,
               std::span<const double> weights) {
  const Eigen::VectorXd w = normalized_weights(labels, weights, logits.rows(), logits.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    loss += w(i) * (lse - logits(i, labels[static_cast<std::size_t>(i)]));
  }
  return loss;
}

double loss_and_gradient(const Mlp& mlp, const RowMatrix& x, std::span<const int> labels,
                         std::span<const double> weights, Parameters& grad) {
  const auto trace = detail::forward_trace(mlp, x);
  const Eigen::MatrixXd& logits = trace.pre.back();  // out x batch
  const Eigen::VectorXd w = normalized_weights(labels, weights, logits.cols(), logits.rows());

  Eigen::MatrixXd dz = detail::softmax_columns(logits);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const int y = labels[static_cast<std::size_t>(j)];
    const double m = logits.col(j).maxCoeff();
    const double lse = m + std::log((logits.col(j).array() - m).exp().sum());
    loss += w(j) * (lse - logits(y, j));
    dz(y, j) -= 1.0;
    dz.col(j) *= w(j);
  }

  grad = mlp.params.zeros_like();
  const std::size_t depth = mlp.params.layers.size();
  for (std::size_t k = depth; k-- > 0;) {
    grad.layers[k].weight.noalias() = dz * trace.inputs[k].transpose();
    grad.layers[k].bias = dz.rowwise().sum();
    if (k > 0) {
      Eigen::MatrixXd da = mlp.params.layers[k].weight.transpose() * dz;
      dz = da.cwiseProduct(detail::activate_grad(mlp.spec.activation, trace.pre[k - 1]));
    }
  }
  return loss;
}

Parameters backward(const Mlp& mlp, const RowMatrix& x, std::span<const int> labels,
                    std::span<const double> weights) {
  Parameters grad;
  loss_and_gradient(mlp, x, labels, weights, grad);
  return grad;
}

}  // namespace amplab::nn
