#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>

#include "amplab/data/dataset.hpp"
#include "amplab/nn/mlp.hpp"

namespace amplab::metrics {

// Fraction of rows whose argmax prediction (ties -> lowest class id) is
// correct, optionally restricted to one group. Throws EmptyDataError when
// no row is selected.
double group_accuracy(const nn::Mlp& mlp, const data::GroupedDataset& ds,
                      std::optional<int> group = std::nullopt);

// Accuracy from precomputed logits (rows are samples).
double group_accuracy(const Eigen::MatrixXd& logits, const data::GroupedDataset& ds,
                      std::optional<int> group = std::nullopt);

// Two-class accuracy on the rows labelled i or j, comparing only logits i
// and j. Equal logits predict min(i, j).
double masked_pair_accuracy(const nn::Mlp& mlp, const data::GroupedDataset& ds, int class_i,
                            int class_j);
double masked_pair_accuracy(const Eigen::MatrixXd& logits, std::span<const int> labels,
                            int class_i, int class_j);

// Symmetric matrix of masked pair accuracies; the diagonal is 1 by convention.
Eigen::MatrixXd pairwise_difficulty_matrix(const nn::Mlp& mlp, const data::GroupedDataset& ds);
Eigen::MatrixXd pairwise_difficulty_matrix(const Eigen::MatrixXd& logits,
                                           std::span<const int> labels, int num_classes);

// 1 - cos(mean_i, mean_j) over the rows of the two classes.
double cosine_distance_class_means(const data::GroupedDataset& ds, int class_i, int class_j);

}  // namespace amplab::metrics
