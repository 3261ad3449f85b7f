#include "amplab/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "amplab/core/error.hpp"

namespace amplab::data {

namespace {

std::vector<std::string> default_names(const std::vector<int>& ids, const char* prefix) {
  int count = 0;
  for (int id : ids) count = std::max(count, id + 1);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return names;
}

}  // namespace

GroupedDataset::GroupedDataset(RowMatrix features, std::vector<int> labels,
                               std::vector<int> groups, std::vector<std::string> class_names,
                               std::vector<std::string> group_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      groups_(std::move(groups)),
      class_names_(std::move(class_names)),
      group_names_(std::move(group_names)) {
  const auto n = static_cast<std::size_t>(features_.rows());
  if (labels_.size() != n || groups_.size() != n) {
    throw ShapeError("dataset: " + std::to_string(n) + " feature rows but " +
                     std::to_string(labels_.size()) + " labels and " +
                     std::to_string(groups_.size()) + " groups");
  }
  if (class_names_.empty()) class_names_ = default_names(labels_, "class_");
  if (group_names_.empty()) group_names_ = default_names(groups_, "group_");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels_[i] < 0 || labels_[i] >= num_classes()) {
      throw LabelError("dataset: row " + std::to_string(i) + " has label " +
                       std::to_string(labels_[i]) + " outside [0, " +
                       std::to_string(num_classes()) + ")");
    }
    if (groups_[i] < 0 || groups_[i] >= num_groups()) {
      throw GroupError("dataset: row " + std::to_string(i) + " has group " +
                       std::to_string(groups_[i]) + " outside [0, " +
                       std::to_string(num_groups()) + ")");
    }
  }
  if (!features_.allFinite()) throw InvalidParameterError("dataset: non-finite feature value");
}

std::vector<std::size_t> GroupedDataset::group_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_groups()), 0);
  for (int g : groups_) ++counts[static_cast<std::size_t>(g)];
  return counts;
}

std::vector<std::size_t> GroupedDataset::label_histogram(int group) const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes()), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    if (groups_[i] == group) ++counts[static_cast<std::size_t>(labels_[i])];
  }
  return counts;
}

std::vector<std::vector<std::size_t>> GroupedDataset::cell_counts() const {
  std::vector<std::vector<std::size_t>> counts(
      static_cast<std::size_t>(num_groups()),
      std::vector<std::size_t>(static_cast<std::size_t>(num_classes()), 0));
  for (std::size_t i = 0; i < size(); ++i) {
    ++counts[static_cast<std::size_t>(groups_[i])][static_cast<std::size_t>(labels_[i])];
  }
  return counts;
}

std::vector<std::size_t> GroupedDataset::rows_of_group(int group) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i) {
    if (groups_[i] == group) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> GroupedDataset::rows_of_cell(int group, int label) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i) {
    if (groups_[i] == group && labels_[i] == label) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> GroupedDataset::rows_of_label(int label) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i) {
    if (labels_[i] == label) rows.push_back(i);
  }
  return rows;
}

GroupedDataset GroupedDataset::subset(std::span<const std::size_t> rows) const {
  RowMatrix x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<int> labels;
  std::vector<int> groups;
  labels.reserve(rows.size());
  groups.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    if (r >= size()) throw ShapeError("subset: row " + std::to_string(r) + " out of range");
    x.row(static_cast<Eigen::Index>(k)) = features_.row(static_cast<Eigen::Index>(r));
    labels.push_back(labels_[r]);
    groups.push_back(groups_[r]);
  }
  return GroupedDataset(std::move(x), std::move(labels), std::move(groups), class_names_,
                        group_names_);
}

GroupedDataset concat(const GroupedDataset& a, const GroupedDataset& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.dim() != b.dim()) {
    throw ShapeError("concat: feature dimensions " + std::to_string(a.dim()) + " and " +
                     std::to_string(b.dim()) + " differ");
  }
  auto merge = [](const std::vector<std::string>& x, const std::vector<std::string>& y,
                  const char* what) {
    const auto& longer = x.size() >= y.size() ? x : y;
    const auto& shorter = x.size() >= y.size() ? y : x;
    if (!std::equal(shorter.begin(), shorter.end(), longer.begin())) {
      throw SchemaError(std::string("concat: ") + what + " names disagree");
    }
    return longer;
  };
  RowMatrix x(a.features().rows() + b.features().rows(), a.features().cols());
  x << a.features(), b.features();
  std::vector<int> labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  std::vector<int> groups = a.groups();
  groups.insert(groups.end(), b.groups().begin(), b.groups().end());
  return GroupedDataset(std::move(x), std::move(labels), std::move(groups),
                        merge(a.class_names(), b.class_names(), "class"),
                        merge(a.group_names(), b.group_names(), "group"));
}

void write_csv(const GroupedDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t j = 0; j < ds.dim(); ++j) out << "feature_" << j << ',';
  out << "label,group\n";
  char buf[32];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g",
                    ds.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out << buf << ',';
    }
    out << ds.labels()[i] << ',' << ds.groups()[i] << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

GroupedDataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + ": missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[header.size() - 2] != "label" || header.back() != "group") {
    throw SchemaError(path.string() + ": header must end with label,group");
  }
  const std::size_t d = header.size() - 2;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "feature_" + std::to_string(j)) {
      throw SchemaError(path.string() + ": unexpected column '" + header[j] + "'");
    }
  }
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<int> groups;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      if (col < d) {
        values.push_back(std::strtod(cell.c_str(), &end));
      } else if (col < d + 2) {
        const long v = std::strtol(cell.c_str(), &end, 10);
        (col == d ? labels : groups).push_back(static_cast<int>(v));
      }
      if (col >= d + 2 || end == cell.c_str() || *end != '\0') {
        throw SchemaError(path.string() + ": bad value on line " + std::to_string(line_no));
      }
      ++col;
    }
    if (col != d + 2) {
      throw SchemaError(path.string() + ": line " + std::to_string(line_no) + " has " +
                        std::to_string(col) + " fields, expected " + std::to_string(d + 2));
    }
  }
  RowMatrix x(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      x(i, j) = values[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)];
    }
  }
  return GroupedDataset(std::move(x), std::move(labels), std::move(groups));
}

}  // namespace amplab::data
