#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amplab/data/dataset.hpp"
#include "amplab/harness/config.hpp"
#include "amplab/harness/protocols.hpp"
#include "amplab/metrics/disparity.hpp"

namespace amplab::harness {

struct MitigationStrategy {
  enum class Kind { oversample, add_data };
  Kind kind = Kind::oversample;
  double amount = 2.0;  // sampling weight (oversample) or growth factor (add_data)
  int target_group = 1;

  static MitigationStrategy from_config(const ExperimentConfig& config);
  std::string name() const;
};

// Observed disparity of one group pair before and after the intervention.
struct PairDelta {
  int group_a = 0;
  int group_b = 1;
  std::vector<double> d_before;  // per run, configured checkpoint
  std::vector<double> d_after;
  double mean_before = 0.0;
  double mean_after = 0.0;
  double delta = 0.0;  // mean_after - mean_before
};

struct MitigationResult {
  MitigationStrategy strategy;
  std::vector<metrics::DisparityReport> before;
  std::vector<metrics::DisparityReport> after;
  std::vector<PairDelta> deltas;
};

// Audits the baseline, then reruns only the combined stage with the
// intervention applied to each run's training split (test splits and
// stage-one results are shared). add_data draws new target-group rows
// from `reserve`, which must contain only that group.
MitigationResult mitigation_experiment(const data::GroupedDataset& ds,
                                       const std::optional<data::GroupedDataset>& reserve,
                                       const MitigationStrategy& strategy,
                                       const ExperimentConfig& config);

}  // namespace amplab::harness
