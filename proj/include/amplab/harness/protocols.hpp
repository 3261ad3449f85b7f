#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "amplab/data/dataset.hpp"
#include "amplab/data/sampler.hpp"
#include "amplab/harness/config.hpp"
#include "amplab/metrics/disparity.hpp"
#include "amplab/nn/train.hpp"

namespace amplab::harness {

// One stratified train/test split per run; every stage of a protocol
// shares run r's split.
struct RunSplit {
  data::GroupedDataset train;
  data::GroupedDataset test;
  std::uint64_t seed = 0;
};
std::vector<RunSplit> make_splits(const data::GroupedDataset& ds, const ExperimentConfig& config);

// Seeds for run `run` of condition `condition`.
struct RunSeeds {
  std::uint64_t init = 0;
  std::uint64_t batches = 0;
};
RunSeeds run_seeds(const ExperimentConfig& config, const std::string& condition, std::size_t run);

// Trains one model for (condition, run). Errors are rethrown with the
// condition and run prepended.
nn::TrainResult train_run(const ExperimentConfig& config, const std::string& condition,
                          std::size_t run, const data::GroupedDataset& train_set,
                          const data::GroupedDataset& test_set,
                          const std::optional<data::Sampler>& sampler = std::nullopt);

// Accuracy read off a curve at the configured checkpoint choice.
double curve_accuracy(const nn::TrainingCurve& curve, CheckpointChoice which,
                      std::optional<int> group = std::nullopt);

struct GroupRuns {
  int group = 0;
  std::string name;
  std::vector<double> early_stopped;  // one per run
  std::vector<double> final;
  std::vector<std::uint64_t> seeds;   // init seed per run
};

struct SingleGroupResult {
  std::vector<GroupRuns> groups;
};

struct CombinedResult {
  std::vector<GroupRuns> groups;
  std::vector<double> overall_early_stopped;
  std::vector<double> overall_final;
  std::vector<nn::TrainingCurve> curves;  // one per run
};

// Hooks that alter the combined stage (used by mitigation).
struct CombinedOptions {
  std::string condition = "comb";
  // Replaces run r's training split.
  std::function<data::GroupedDataset(const data::GroupedDataset& train, std::size_t run)> transform_train;
  // Custom mini-batch sampler for run r's (possibly transformed) training split.
  std::function<data::Sampler(const data::GroupedDataset& train, std::size_t run,
                              std::uint64_t batch_seed)>
      make_sampler;
};

// Stage one: per group, N models trained and tested on that group's rows only.
SingleGroupResult run_single_group_protocol(const data::GroupedDataset& ds,
                                            const ExperimentConfig& config,
                                            const std::vector<RunSplit>* splits = nullptr);

// Stage two: N models trained on every group, evaluated per group.
CombinedResult run_combined_protocol(const data::GroupedDataset& ds, const ExperimentConfig& config,
                                     const std::vector<RunSplit>* splits = nullptr,
                                     const CombinedOptions& options = {});

struct TrajectoryPoint {
  std::int64_t step = 0;
  double d_mean = 0.0;
  std::optional<double> d_stderr;
};

// Observed disparity (a minus b) per checkpoint, averaged over runs.
std::vector<TrajectoryPoint> disparity_trajectory(const std::vector<nn::TrainingCurve>& curves,
                                                  int group_a, int group_b);

struct AuditResult {
  std::vector<metrics::DisparityReport> reports;  // pairs a < b
  std::vector<std::vector<TrajectoryPoint>> trajectories;  // parallel to reports
  SingleGroupResult single;
  CombinedResult combined;

  const metrics::DisparityReport& report(int a, int b) const;
};

AuditResult assemble_audit(const data::GroupedDataset& ds, SingleGroupResult single,
                           CombinedResult combined);

// Both stages plus a DisparityReport for every group pair.
AuditResult audit(const data::GroupedDataset& ds, const ExperimentConfig& config);

}  // namespace amplab::harness
