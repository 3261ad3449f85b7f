#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "amplab/data/dataset.hpp"

namespace amplab::data {

inline constexpr double kDefaultTestFraction = 0.2;

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Each (group, label) cell sends round(size * fraction) rows to test,
// clamped so both sides keep at least one row. Throws StratificationError
// for cells with fewer than two rows.
SplitIndices stratified_split_indices(const GroupedDataset& ds, double test_fraction,
                                      std::uint64_t seed);

std::pair<GroupedDataset, GroupedDataset> stratified_split(const GroupedDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed);

enum class BalanceMode {
  matched_labels,  // per-label cell minima across groups
  size_only,       // equal group sizes, label histograms left as they fall
};

// Subsamples so every group has the same size. In matched_labels mode each
// group keeps min_g count(g, label) rows of every label, which makes the
// per-group label histograms identical; a label missing from some group
// raises BalanceError listing the empty cells.
GroupedDataset balance_groups(const GroupedDataset& ds, std::uint64_t seed,
                              BalanceMode mode = BalanceMode::matched_labels);

// Grows `group` to round(factor * current size) with rows drawn without
// replacement from `reserve`, which must hold only rows of that group.
GroupedDataset augment_group(const GroupedDataset& base, const GroupedDataset& reserve,
                             int group, double factor, std::uint64_t seed);

// Keeps rows of the listed classes and renumbers them 0..k-1 in ascending
// class-id order.
GroupedDataset select_classes(const GroupedDataset& ds, std::vector<int> classes);

GroupedDataset restrict_to_group(const GroupedDataset& ds, int group);

}  // namespace amplab::data
