#include "amplab/metrics/accuracy.hpp"

#include <cmath>

#include "amplab/core/error.hpp"

namespace amplab::metrics {

namespace {

int argmax_row(const Eigen::MatrixXd& logits, Eigen::Index row) {
  int best = 0;
  for (Eigen::Index k = 1; k < logits.cols(); ++k) {
    if (logits(row, k) > logits(row, best)) best = static_cast<int>(k);
  }
  return best;
}

void check_class(int c, Eigen::Index classes) {
  if (c < 0 || c >= classes) throw ClassError("class " + std::to_string(c) + " out of range");
}

}  // namespace

double group_accuracy(const Eigen::MatrixXd& logits, const data::GroupedDataset& ds,
                      std::optional<int> group) {
  if (logits.rows() != static_cast<Eigen::Index>(ds.size())) {
    throw ShapeError("group_accuracy: logits rows do not match dataset size");
  }
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (group && ds.groups()[i] != *group) continue;
    ++total;
    if (argmax_row(logits, static_cast<Eigen::Index>(i)) == ds.labels()[i]) ++correct;
  }
  if (total == 0) {
    throw EmptyDataError(group ? "group_accuracy: no rows in group " + std::to_string(*group)
                               : std::string("group_accuracy: empty dataset"));
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

double group_accuracy(const nn::Mlp& mlp, const data::GroupedDataset& ds,
                      std::optional<int> group) {
  return group_accuracy(nn::forward(mlp, ds.features()), ds, group);
}

double masked_pair_accuracy(const Eigen::MatrixXd& logits, std::span<const int> labels,
                            int class_i, int class_j) {
  check_class(class_i, logits.cols());
  check_class(class_j, logits.cols());
  if (class_i == class_j) throw ClassError("masked_pair_accuracy: classes must differ");
  const int lo = std::min(class_i, class_j);
  const int hi = std::max(class_i, class_j);
  std::size_t correct = 0;
  std::size_t seen_lo = 0;
  std::size_t seen_hi = 0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const int y = labels[r];
    if (y != lo && y != hi) continue;
    (y == lo ? seen_lo : seen_hi)++;
    const auto row = static_cast<Eigen::Index>(r);
    const int pred = logits(row, hi) > logits(row, lo) ? hi : lo;
    if (pred == y) ++correct;
  }
  if (seen_lo == 0 || seen_hi == 0) {
    throw ClassError("masked_pair_accuracy: class " + std::to_string(seen_lo == 0 ? lo : hi) +
                     " has no rows");
  }
  return static_cast<double>(correct) / static_cast<double>(seen_lo + seen_hi);
}

double masked_pair_accuracy(const nn::Mlp& mlp, const data::GroupedDataset& ds, int class_i,
                            int class_j) {
  return masked_pair_accuracy(nn::forward(mlp, ds.features()), ds.labels(), class_i, class_j);
}

Eigen::MatrixXd pairwise_difficulty_matrix(const Eigen::MatrixXd& logits,
                                           std::span<const int> labels, int num_classes) {
  if (num_classes < 2) throw ClassError("pairwise_difficulty_matrix needs >= 2 classes");
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(num_classes, num_classes);
  for (int i = 0; i < num_classes; ++i) {
    for (int j = i + 1; j < num_classes; ++j) {
      m(i, j) = m(j, i) = masked_pair_accuracy(logits, labels, i, j);
    }
  }
  return m;
}

Eigen::MatrixXd pairwise_difficulty_matrix(const nn::Mlp& mlp, const data::GroupedDataset& ds) {
  return pairwise_difficulty_matrix(nn::forward(mlp, ds.features()), ds.labels(),
                                    ds.num_classes());
}

double cosine_distance_class_means(const data::GroupedDataset& ds, int class_i, int class_j) {
  auto mean_of = [&](int c) {
    if (c < 0 || c >= ds.num_classes()) throw ClassError("class " + std::to_string(c) + " out of range");
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ds.dim()));
    std::size_t count = 0;
    for (std::size_t r = 0; r < ds.size(); ++r) {
      if (ds.labels()[r] != c) continue;
      sum += ds.features().row(static_cast<Eigen::Index>(r)).transpose();
      ++count;
    }
    if (count == 0) throw ClassError("class " + std::to_string(c) + " has no rows");
    return Eigen::VectorXd(sum / static_cast<double>(count));
  };
  const Eigen::VectorXd a = mean_of(class_i);
  const Eigen::VectorXd b = mean_of(class_j);
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw DegenerateError("cosine distance: class " +
                          std::to_string(na == 0.0 ? class_i : class_j) + " has a zero mean vector");
  }
  return 1.0 - a.dot(b) / (na * nb);
}

}  // namespace amplab::metrics
