#include "amplab/nn/train.hpp"

#include <cmath>
#include <fstream>

namespace amplab::nn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidParameterError("learning_rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidParameterError("momentum must be in [0,1)");
  if (!(weight_decay >= 0.0)) throw InvalidParameterError("weight_decay must be >= 0");
  if (epochs < 1) throw InvalidParameterError("epochs must be >= 1");
  if (batch_size < 1) throw InvalidParameterError("batch_size must be >= 1");
  if (eval_every < 1) throw InvalidParameterError("eval_every must be >= 1");
  if (grad_penalty) {
    if (!(grad_penalty->lambda >= 0.0)) throw InvalidParameterError("penalty lambda must be >= 0");
    if (!(grad_penalty->c >= 0.0)) throw InvalidParameterError("penalty C must be >= 0");
  }
}

const Checkpoint& TrainingCurve::best() const {
  const Checkpoint* best = &checkpoints.front();
  for (const auto& c : checkpoints) {
    if (c.test_acc_overall > best->test_acc_overall) best = &c;
  }
  return *best;
}

void write_curve_csv(const TrainingCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "step,group,split,accuracy,loss\n";
  char buf[96];
  for (const auto& c : curve.checkpoints) {
    for (const auto& [split, accs] : {std::pair{"train", &c.train_acc}, std::pair{"test", &c.test_acc}}) {
      for (const auto& [g, acc] : *accs) {
        std::snprintf(buf, sizeof(buf), "%lld,%d,%s,%.17g,%.17g\n",
                      static_cast<long long>(c.step), g, split, acc, c.loss);
        out << buf;
      }
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void sgd_step(Parameters& params, Parameters& velocity, Parameters grad, double learning_rate,
              double momentum, double weight_decay) {
  if (weight_decay != 0.0) grad.axpy(weight_decay, params);
  velocity.scale(momentum);
  velocity.axpy(1.0, grad);
  params.axpy(-learning_rate, velocity);
}

std::map<int, double> per_group_accuracy(const Mlp& mlp, const data::GroupedDataset& ds) {
  std::map<int, double> acc;
  if (ds.empty()) return acc;
  const auto pred = predict(mlp, ds.features());
  std::map<int, std::pair<std::size_t, std::size_t>> tally;  // correct, total
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& t = tally[ds.groups()[i]];
    t.first += pred[i] == ds.labels()[i] ? 1 : 0;
    ++t.second;
  }
  for (const auto& [g, t] : tally) {
    acc[g] = static_cast<double>(t.first) / static_cast<double>(t.second);
  }
  return acc;
}

namespace {

Checkpoint evaluate(const Mlp& mlp, std::int64_t step, const data::GroupedDataset& train_set,
                    const data::GroupedDataset& test_set) {
  Checkpoint c;
  c.step = step;
  const Eigen::MatrixXd train_logits = forward(mlp, train_set.features());
  c.loss = ce_loss(train_logits, train_set.labels());
  c.train_acc = per_group_accuracy(mlp, train_set);
  c.test_acc = per_group_accuracy(mlp, test_set);
  const auto counts = test_set.group_counts();
  double correct = 0.0;
  for (const auto& [g, acc] : c.test_acc) correct += acc * static_cast<double>(counts[static_cast<std::size_t>(g)]);
  c.test_acc_overall = correct / static_cast<double>(test_set.size());
  return c;
}

void check_datasets(const Mlp& mlp, const data::GroupedDataset& train_set,
                    const data::GroupedDataset& test_set) {
  if (train_set.empty()) throw EmptyDataError("train: training split is empty");
  if (test_set.empty()) throw EmptyDataError("train: test split is empty");
  for (const auto* ds : {&train_set, &test_set}) {
    if (static_cast<int>(ds->dim()) != mlp.spec.input_dim) {
      throw ShapeError("train: dataset has " + std::to_string(ds->dim()) +
                       " features, network expects " + std::to_string(mlp.spec.input_dim));
    }
    if (ds->num_classes() > mlp.spec.output_dim) {
      throw LabelError("train: dataset has " + std::to_string(ds->num_classes()) +
                       " classes but the network has " + std::to_string(mlp.spec.output_dim) +
                       " outputs");
    }
  }
  if (train_set.num_classes() != test_set.num_classes()) {
    throw LabelError("train: train and test label spaces differ");
  }
}

}  // namespace

TrainResult train(const Mlp& initial, const data::GroupedDataset& train_set,
                  const data::GroupedDataset& test_set, data::BatchSource& batches,
                  const TrainConfig& config) {
  config.validate();
  check_datasets(initial, train_set, test_set);

  TrainResult result{initial, {}};
  Mlp& mlp = result.model;
  if (mlp.spec.input_batchnorm) mlp.input = InputTransform::standardize(train_set.features());

  const auto n = train_set.size();
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const std::int64_t steps_per_epoch = static_cast<std::int64_t>((n + batch - 1) / batch);
  const std::int64_t total_steps = steps_per_epoch * config.epochs;

  auto checkpoint = [&](std::int64_t step) {
    Checkpoint c = evaluate(mlp, step, train_set, test_set);
    if (!std::isfinite(c.loss)) {
      throw DivergenceError("non-finite training loss at step " + std::to_string(step), step,
                            result.curve);
    }
    result.curve.checkpoints.push_back(std::move(c));
  };
  checkpoint(0);

  Parameters velocity = mlp.params.zeros_like();
  Parameters grad;
  std::vector<std::size_t> rows;
  std::vector<int> labels;
  RowMatrix xb;
  for (std::int64_t step = 1; step <= total_steps; ++step) {
    const auto offset = static_cast<std::size_t>((step - 1) % steps_per_epoch) * batch;
    const std::size_t count = std::min(batch, n - offset);
    batches.next(count, rows);
    xb.resize(static_cast<Eigen::Index>(count), train_set.features().cols());
    labels.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      xb.row(static_cast<Eigen::Index>(k)) = train_set.features().row(static_cast<Eigen::Index>(rows[k]));
      labels[k] = train_set.labels()[rows[k]];
    }
    double loss = loss_and_gradient(mlp, xb, labels, {}, grad);
    if (config.grad_penalty && config.grad_penalty->lambda > 0.0) {
      const auto& gp = *config.grad_penalty;
      loss += grad_penalty_value(mlp, xb, gp.lambda, gp.c, gp.scalarization);
      grad.axpy(1.0, grad_penalty_backward(mlp, xb, gp.lambda, gp.c, gp.mode, gp.scalarization));
    }
    if (!std::isfinite(loss)) {
      throw DivergenceError("non-finite mini-batch loss at step " + std::to_string(step), step,
                            result.curve);
    }
    sgd_step(mlp.params, velocity, std::move(grad), config.learning_rate, config.momentum,
             config.weight_decay);
    if (step % config.eval_every == 0 || step == total_steps) checkpoint(step);
  }
  return result;
}

TrainResult train(const Mlp& mlp, const data::GroupedDataset& train_set,
                  const data::GroupedDataset& test_set, const data::Sampler& sampler,
                  const TrainConfig& config) {
  if (train_set.empty()) throw EmptyDataError("train: training split is empty");
  auto source = data::make_batch_source(sampler, train_set.size());
  return train(mlp, train_set, test_set, *source, config);
}

}  // namespace amplab::nn
