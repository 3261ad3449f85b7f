#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "amplab/data/dataset.hpp"
#include "amplab/data/generators.hpp"
#include "amplab/harness/config.hpp"
#include "amplab/harness/protocols.hpp"
#include "amplab/metrics/disparity.hpp"
#include "amplab/stats/design.hpp"
#include "amplab/stats/ols.hpp"

namespace amplab::harness {

// A two-group binary task drawn by a task sampler.
struct SampledTask {
  data::GroupedDataset ds;
  double knob = 0.0;  // difficulty setting that produced it
  std::uint64_t seed = 0;
};
using TaskSampler = std::function<SampledTask(std::size_t index, std::uint64_t seed)>;

// Teaser tasks whose complex-group frequency is drawn uniformly from `grid`.
TaskSampler teaser_task_sampler(data::TeaserParams base, std::vector<double> grid);

struct TaskRecord {
  std::size_t task_id = 0;
  double knob = 0.0;
  double d_tilde = 0.0;
  double d = 0.0;
  metrics::SeparabilityVector cells;
  std::vector<std::uint64_t> seeds;  // task seed, then protocol seed
  std::vector<TrajectoryPoint> d_trajectory;  // observed disparity per checkpoint
};

// Binary accuracies for the four separability cells of group pair (0, 1),
// each from N dedicated trainings on the cell-pair rows of run r's split.
metrics::SeparabilityVector measure_cells(const data::GroupedDataset& ds,
                                          const ExperimentConfig& config,
                                          const std::vector<RunSplit>& splits);

// Audit plus separability cells for one task; disparities are read at the
// configured checkpoint.
TaskRecord measure_task(const data::GroupedDataset& ds, const ExperimentConfig& config,
                        std::size_t task_id, double knob);

struct AmplificationFit {
  stats::RegressionResult no_intercept;    // designated fit
  stats::RegressionResult with_intercept;
  stats::RegressionResult d_tilde_only;    // no intercept, no nuisance columns
  std::vector<std::string> dropped_no_intercept;    // nuisance columns removed as dependent
  std::vector<std::string> dropped_with_intercept;
  double k = 0.0;
  double k_stderr = 0.0;
  double r_squared = 0.0;
};

// Regression design: d_tilde followed by the four separability columns.
stats::DesignMatrix amplification_design(const std::vector<TaskRecord>& records);

// Fits d on d_tilde plus separability columns. Nuisance columns that are
// linearly dependent are dropped and listed; a dependent or constant
// d_tilde raises SingularDesignError. Needs more than 6 records.
AmplificationFit fit_amplification(const std::vector<TaskRecord>& records);
// Same, with the response replaced (used for per-step fits).
AmplificationFit fit_amplification(const std::vector<TaskRecord>& records,
                                   const std::vector<double>& response);

struct AmplificationReport {
  std::vector<TaskRecord> records;
  AmplificationFit fit;
};

AmplificationReport amplification_sweep(const TaskSampler& sampler, std::size_t m_tasks,
                                        const ExperimentConfig& config);

struct SweepPoint {
  double value = 0.0;
  double k = 0.0;
  double k_stderr = 0.0;
  double r_squared = 0.0;
  double k_intercept = 0.0;  // d_tilde coefficient of the fit with intercept
  double k_intercept_stderr = 0.0;
};

struct SweepResult {
  std::string variable;  // width | step | weight_decay | grad_penalty_c
  std::vector<double> grid;
  std::vector<SweepPoint> points;
  std::vector<AmplificationReport> reports;  // one per grid value (one total for step)
};

inline const std::vector<std::string> kSweepVariables = {"width", "step", "weight_decay",
                                                         "grad_penalty_c"};

// Runs amplification_sweep per grid value. For `step` the grid is replaced
// by the checkpoint steps of a single sweep, and each point refits on the
// observed disparity at that step.
SweepResult design_sweep(const std::string& variable, const std::vector<double>& grid,
                         const TaskSampler& sampler, std::size_t m_tasks,
                         const ExperimentConfig& config);

// Config for one grid value of a width / weight_decay / grad_penalty_c sweep.
ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& variable,
                                   double value);

}  // namespace amplab::harness
