#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "amplab/data/dataset.hpp"
#include "amplab/harness/config.hpp"
#include "amplab/nn/mlp.hpp"
#include "amplab/stats/pls.hpp"

namespace amplab::harness {

// Rank analysis over the m(m-1)/2 class pairs (i < j, row-major order).
struct PairwiseAnalysis {
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<double>> accuracies;  // per model, one entry per pair
  std::vector<std::vector<double>> accuracy_ranks;
  std::vector<double> distances;
  std::vector<double> distance_ranks;
  Eigen::MatrixXd tau;  // model x model Kendall tau-b
  stats::PlsModel pls;  // distance ranks on accuracy ranks (pairs x models)
  double r_squared = 0.0;
};

// Pure analysis step: symmetric pair-accuracy matrices (one per model)
// and class-mean distances in the same pair order.
PairwiseAnalysis pairwise_analysis(const std::vector<Eigen::MatrixXd>& matrices,
                                   const std::vector<double>& distances);

struct PairwiseResult {
  std::vector<nn::MlpSpec> specs;
  std::vector<std::string> class_names;
  std::vector<Eigen::MatrixXd> matrices;  // masked pair accuracy, averaged over runs
  PairwiseAnalysis analysis;
};

// Trains every spec over N splits on all classes and compares their pair
// difficulty rankings. Seeds derive from the serialized spec, so a spec
// listed twice reproduces itself exactly. Matrices use the final model.
PairwiseResult pairwise_difficulty_experiment(const data::GroupedDataset& ds,
                                              const std::vector<nn::MlpSpec>& specs,
                                              const ExperimentConfig& config);

// Specs from config.pairwise_models with the base model's other settings.
std::vector<nn::MlpSpec> pairwise_specs(const ExperimentConfig& config);

}  // namespace amplab::harness
