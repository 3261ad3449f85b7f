#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace amplab {

// Rows are samples.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace data {

// Feature matrix with a class label and a group label per row. Immutable
// once constructed; the constructor enforces every invariant.
class GroupedDataset {
 public:
  GroupedDataset() = default;

  // Empty name lists are filled with "class_<i>" / "group_<i>" sized to
  // the largest id present.
  GroupedDataset(RowMatrix features, std::vector<int> labels, std::vector<int> groups,
                 std::vector<std::string> class_names = {},
                 std::vector<std::string> group_names = {});

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  int num_classes() const noexcept { return static_cast<int>(class_names_.size()); }
  int num_groups() const noexcept { return static_cast<int>(group_names_.size()); }

  const RowMatrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<int>& groups() const noexcept { return groups_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  const std::vector<std::string>& group_names() const noexcept { return group_names_; }

  std::vector<std::size_t> group_counts() const;
  std::vector<std::size_t> label_histogram(int group) const;
  // counts[group][label]
  std::vector<std::vector<std::size_t>> cell_counts() const;

  std::vector<std::size_t> rows_of_group(int group) const;
  std::vector<std::size_t> rows_of_cell(int group, int label) const;
  std::vector<std::size_t> rows_of_label(int label) const;

  // Rows in the given order; label and group spaces are preserved.
  GroupedDataset subset(std::span<const std::size_t> rows) const;

 private:
  RowMatrix features_;
  std::vector<int> labels_;
  std::vector<int> groups_;
  std::vector<std::string> class_names_;
  std::vector<std::string> group_names_;
};

// Rows of `a` followed by rows of `b`. Name lists must agree where both define them.
GroupedDataset concat(const GroupedDataset& a, const GroupedDataset& b);

// Header `feature_0..feature_{d-1},label,group`; values written with 17
// significant digits so a round trip is exact.
void write_csv(const GroupedDataset& ds, const std::filesystem::path& path);
GroupedDataset read_csv(const std::filesystem::path& path);

}  // namespace data
}  // namespace amplab
