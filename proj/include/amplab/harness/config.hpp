#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "amplab/data/dataset.hpp"
#include "amplab/data/generators.hpp"
#include "amplab/nn/mlp.hpp"
#include "amplab/nn/train.hpp"

namespace amplab::harness {

struct TaskSource {
  enum class Kind { teaser, csv, idx, blobs };
  Kind kind = Kind::teaser;
  data::TeaserParams teaser;
  std::filesystem::path path;    // csv
  std::filesystem::path images;  // idx
  std::filesystem::path labels;  // idx
  // Optional class pairs stitched into a two-group binary task (csv / idx).
  std::vector<int> pair_a;
  std::vector<int> pair_b;
  // blobs
  int blob_classes = 6;
  int blob_dim = 8;
  std::size_t blob_per_class = 200;
  double blob_separation = 1.5;
  double blob_spread = 1.0;
};

// Which checkpoint the protocols read accuracies from.
enum class CheckpointChoice { early_stopped, final };

// Called before every training run; used by tests to observe data access.
struct TrainJobInfo {
  std::string condition;
  std::size_t run = 0;
  const data::GroupedDataset* train_set = nullptr;
  const data::GroupedDataset* test_set = nullptr;
};
using TrainObserver = std::function<void(const TrainJobInfo&)>;

struct ExperimentConfig {
  TaskSource task;
  // input_dim and output_dim are filled in from the data at run time.
  nn::MlpSpec model{0, {64}, 2, nn::Activation::relu, true};
  nn::TrainConfig train;
  int n_runs = 10;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  int jobs = 1;
  CheckpointChoice checkpoint = CheckpointChoice::early_stopped;

  // amplification sweep
  int tasks = 30;
  std::vector<double> frequency_grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};

  // design sweep: width | step | weight_decay | grad_penalty_c
  std::string sweep_variable = "width";
  std::vector<double> sweep_grid{16, 32, 64, 128};

  // mitigation: oversample | add_data
  std::string strategy = "oversample";
  double factor = 1.6;
  double weight = 2.0;
  int target_group = 1;

  // pairwise experiment: one hidden-width list per model
  std::vector<std::vector<int>> pairwise_models{{64}, {256, 256, 256}};

  std::filesystem::path output_dir = "amplab-out";

  TrainObserver on_train;  // not part of the file format

  void validate() const;
};

// Flat "section.key" -> value view of a configuration.
using KeyValues = std::map<std::string, std::string>;

// INI-style file: [task] / [model] / [train] / [protocol] / [output]
// sections of `key = value` lines. Unknown keys raise ConfigError.
KeyValues read_config_file(const std::filesystem::path& path);

// Applies `section.key=value` assignments on top of defaults.
ExperimentConfig config_from_keys(const KeyValues& kv);
KeyValues config_to_keys(const ExperimentConfig& config);

// Sorted `key = value` lines of the fully resolved configuration.
std::string canonical_text(const ExperimentConfig& config);
// 16 hex digits of FNV-1a over canonical_text.
std::string config_hash(const ExperimentConfig& config);

// Every recognised key, for help text and validation.
const std::vector<std::string>& known_keys();

// Shrinks runs, epochs and task counts for smoke runs.
void apply_quick_preset(ExperimentConfig& config);

// Loads the configured task; MlpSpec dimensions follow the result.
data::GroupedDataset load_task(const TaskSource& task);
nn::MlpSpec resolve_spec(const nn::MlpSpec& spec, const data::GroupedDataset& ds);

}  // namespace amplab::harness
