#include "amplab/data/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"

namespace amplab::data {

SplitIndices stratified_split_indices(const GroupedDataset& ds, double test_fraction,
                                      std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidParameterError("test fraction must be in (0, 1)");
  }
  if (ds.empty()) throw EmptyDataError("stratified_split: empty dataset");
  Rng rng(seed);
  SplitIndices out;
  for (int g = 0; g < ds.num_groups(); ++g) {
    for (int y = 0; y < ds.num_classes(); ++y) {
      auto rows = ds.rows_of_cell(g, y);
      if (rows.empty()) continue;
      if (rows.size() < 2) {
        throw StratificationError("cell (group " + std::to_string(g) + ", label " +
                                  std::to_string(y) + ") has " + std::to_string(rows.size()) +
                                  " row; stratified splitting needs at least 2");
      }
      auto n_test = static_cast<std::size_t>(
          std::llround(static_cast<double>(rows.size()) * test_fraction));
      n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
      const auto pick = rng.choose(rows.size(), n_test);
      std::size_t p = 0;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (p < pick.size() && pick[p] == k) {
          out.test.push_back(rows[k]);
          ++p;
        } else {
          out.train.push_back(rows[k]);
        }
      }
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<GroupedDataset, GroupedDataset> stratified_split(const GroupedDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
  const auto idx = stratified_split_indices(ds, test_fraction, seed);
  return {ds.subset(idx.train), ds.subset(idx.test)};
}

GroupedDataset balance_groups(const GroupedDataset& ds, std::uint64_t seed, BalanceMode mode) {
  const auto cells = ds.cell_counts();
  const auto sizes = ds.group_counts();
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    if (sizes[g] == 0) throw EmptyDataError("balance_groups: group " + std::to_string(g) + " is empty");
  }
  if (sizes.empty()) throw EmptyDataError("balance_groups: empty dataset");
  Rng rng(seed);
  std::vector<std::size_t> keep;

  if (mode == BalanceMode::size_only) {
    const std::size_t target = *std::min_element(sizes.begin(), sizes.end());
    for (int g = 0; g < ds.num_groups(); ++g) {
      const auto rows = ds.rows_of_group(g);
      for (std::size_t k : rng.choose(rows.size(), target)) keep.push_back(rows[k]);
    }
  } else {
    std::ostringstream missing;
    std::vector<std::size_t> per_label(static_cast<std::size_t>(ds.num_classes()), 0);
    for (int y = 0; y < ds.num_classes(); ++y) {
      std::size_t lo = cells[0][static_cast<std::size_t>(y)];
      std::size_t hi = 0;
      for (int g = 0; g < ds.num_groups(); ++g) {
        lo = std::min(lo, cells[static_cast<std::size_t>(g)][static_cast<std::size_t>(y)]);
        hi = std::max(hi, cells[static_cast<std::size_t>(g)][static_cast<std::size_t>(y)]);
      }
      if (lo == 0 && hi > 0) {
        for (int g = 0; g < ds.num_groups(); ++g) {
          if (cells[static_cast<std::size_t>(g)][static_cast<std::size_t>(y)] == 0) {
            missing << " (group " << g << ", label " << y << ")";
          }
        }
      }
      per_label[static_cast<std::size_t>(y)] = lo;
    }
    if (!missing.str().empty()) {
      throw BalanceError("balance_groups: cannot match label distributions, empty cells:" +
                         missing.str() + "; use size-only balancing instead");
    }
    for (int g = 0; g < ds.num_groups(); ++g) {
      for (int y = 0; y < ds.num_classes(); ++y) {
        const auto rows = ds.rows_of_cell(g, y);
        for (std::size_t k : rng.choose(rows.size(), per_label[static_cast<std::size_t>(y)])) {
          keep.push_back(rows[k]);
        }
      }
    }
  }
  std::sort(keep.begin(), keep.end());
  return ds.subset(keep);
}

GroupedDataset augment_group(const GroupedDataset& base, const GroupedDataset& reserve,
                             int group, double factor, std::uint64_t seed) {
  if (group < 0 || group >= base.num_groups()) {
    throw GroupError("augment_group: unknown group id " + std::to_string(group));
  }
  if (!(factor >= 1.0) || !std::isfinite(factor)) {
    throw InvalidParameterError("augment_group: factor must be >= 1");
  }
  for (int g : reserve.groups()) {
    if (g != group) {
      throw GroupError("augment_group: reserve holds rows of group " + std::to_string(g) +
                       ", expected only group " + std::to_string(group));
    }
  }
  const std::size_t current = base.group_counts()[static_cast<std::size_t>(group)];
  const auto target =
      static_cast<std::size_t>(std::llround(factor * static_cast<double>(current)));
  const std::size_t needed = target - current;
  if (needed == 0) return base;
  if (reserve.dim() != base.dim()) throw ShapeError("augment_group: reserve feature dimension differs");
  if (needed > reserve.size()) {
    throw InsufficientReserveError("augment_group: need " + std::to_string(needed) +
                                       " reserve rows for group " + std::to_string(group) +
                                       " but only " + std::to_string(reserve.size()) +
                                       " are available (deficit " +
                                       std::to_string(needed - reserve.size()) + ")",
                                   needed - reserve.size());
  }
  Rng rng(seed);
  const auto picked = rng.choose(reserve.size(), needed);
  // Keep the base's name lists; the reserve only contributes rows.
  const GroupedDataset extra = reserve.subset(picked);
  return concat(base, GroupedDataset(extra.features(), extra.labels(), extra.groups(),
                                     base.class_names(), base.group_names()));
}

GroupedDataset select_classes(const GroupedDataset& ds, std::vector<int> classes) {
  if (classes.empty()) throw ClassError("select_classes: no classes given");
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  const auto counts = [&] {
    std::vector<std::size_t> c(static_cast<std::size_t>(ds.num_classes()), 0);
    for (int y : ds.labels()) ++c[static_cast<std::size_t>(y)];
    return c;
  }();
  std::vector<int> remap(static_cast<std::size_t>(ds.num_classes()), -1);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const int c = classes[k];
    if (c < 0 || c >= ds.num_classes() || counts[static_cast<std::size_t>(c)] == 0) {
      throw ClassError("select_classes: class " + std::to_string(c) + " not present");
    }
    remap[static_cast<std::size_t>(c)] = static_cast<int>(k);
    names.push_back(ds.class_names()[static_cast<std::size_t>(c)]);
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (remap[static_cast<std::size_t>(ds.labels()[i])] >= 0) rows.push_back(i);
  }
  const GroupedDataset sub = ds.subset(rows);
  std::vector<int> labels(sub.labels());
  for (int& y : labels) y = remap[static_cast<std::size_t>(y)];
  return GroupedDataset(sub.features(), std::move(labels), sub.groups(), std::move(names),
                        sub.group_names());
}

GroupedDataset restrict_to_group(const GroupedDataset& ds, int group) {
  if (group < 0 || group >= ds.num_groups()) {
    throw GroupError("unknown group id " + std::to_string(group));
  }
  const auto rows = ds.rows_of_group(group);
  return ds.subset(rows);
}

}  // namespace amplab::data
