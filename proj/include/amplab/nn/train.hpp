#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "amplab/core/error.hpp"
#include "amplab/data/dataset.hpp"
#include "amplab/data/sampler.hpp"
#include "amplab/nn/mlp.hpp"

namespace amplab::nn {

struct GradPenalty {
  double lambda = 10.0;
  double c = 1.0;
  PenaltyMode mode = PenaltyMode::exact;
  Scalarization scalarization = Scalarization::automatic;
};

// SGD recipe. Defaults are lr 0.01, momentum 0.9, weight decay 1e-4,
// 500 epochs, batch 128.
struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  int epochs = 500;
  int batch_size = 128;
  std::uint64_t seed = 0;
  std::optional<GradPenalty> grad_penalty;
  int eval_every = 100;  // steps between checkpoints

  void validate() const;
};

struct Checkpoint {
  std::int64_t step = 0;
  std::map<int, double> train_acc;  // by group id
  std::map<int, double> test_acc;
  double test_acc_overall = 0.0;
  double loss = 0.0;  // mean cross-entropy over the full training split
};

struct TrainingCurve {
  std::vector<Checkpoint> checkpoints;

  // Checkpoint with the highest overall test accuracy; earliest wins ties.
  const Checkpoint& best() const;
  const Checkpoint& final() const { return checkpoints.back(); }
};

// Columns step,group,split,accuracy,loss.
void write_curve_csv(const TrainingCurve& curve, const std::filesystem::path& path);

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::int64_t step, TrainingCurve partial)
      : Error(ErrorKind::numeric, "divergence", what), step_(step), partial_(std::move(partial)) {}
  std::int64_t step() const noexcept { return step_; }
  // Checkpoints recorded before the loss went non-finite.
  const TrainingCurve& partial_curve() const noexcept { return partial_; }

 private:
  std::int64_t step_;
  TrainingCurve partial_;
};

// One heavy-ball update: g += wd * theta; v = mu * v + g; theta -= lr * v.
void sgd_step(Parameters& params, Parameters& velocity, Parameters grad, double learning_rate,
              double momentum, double weight_decay);

struct TrainResult {
  Mlp model;
  TrainingCurve curve;
};

// Trains a copy of `mlp`. Inputs are standardized with train-split
// statistics when the spec asks for input batchnorm. Checkpoints are taken
// at step 0, every `eval_every` steps, and at the last step.
TrainResult train(const Mlp& mlp, const data::GroupedDataset& train_set,
                  const data::GroupedDataset& test_set, data::BatchSource& batches,
                  const TrainConfig& config);

TrainResult train(const Mlp& mlp, const data::GroupedDataset& train_set,
                  const data::GroupedDataset& test_set, const data::Sampler& sampler,
                  const TrainConfig& config);

// Accuracy of `mlp` per group present in `ds`.
std::map<int, double> per_group_accuracy(const Mlp& mlp, const data::GroupedDataset& ds);

}  // namespace amplab::nn
