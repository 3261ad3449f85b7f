#include "amplab/data/generators.hpp"

#include <algorithm>
#include <cmath>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"

namespace amplab::data {

namespace {

constexpr double kGroupOffset = 1.05;  // half-width of a group square plus a small gap

}  // namespace

GroupedDataset gen_teaser_task(const TeaserParams& p) {
  if (p.n < 4 || p.n % 4 != 0) {
    throw InvalidParameterError("teaser task needs n >= 4 and divisible by 4, got " +
                                std::to_string(p.n));
  }
  if (!(p.noise >= 0.0 && p.noise <= 1.0)) throw InvalidParameterError("noise must be in [0, 1]");
  if (!(p.frequency >= 0.0) || !(p.easy_frequency >= 0.0)) {
    throw InvalidParameterError("frequency must be >= 0");
  }
  if (!(p.margin >= 0.0 && p.margin < 2.0)) throw InvalidParameterError("margin must be in [0, 2)");
  if (!(p.amplitude >= 0.0)) throw InvalidParameterError("amplitude must be >= 0");

  Rng rng(p.seed);
  const std::size_t cell = p.n / 4;
  RowMatrix x(static_cast<Eigen::Index>(p.n), 2);
  std::vector<int> labels(p.n);
  std::vector<int> groups(p.n);

  std::size_t row = 0;
  for (int g = 0; g < 2; ++g) {
    const double freq = g == 0 ? p.easy_frequency : p.frequency;
    const bool linear = g == 0 && p.easy_frequency == 0.0;
    for (int y = 0; y < 2; ++y) {
      for (std::size_t k = 0; k < cell; ++k) {
        double u, v;
        for (;;) {
          u = rng.uniform(-1.0, 1.0);
          v = rng.uniform(-1.0, 1.0);
          const double boundary = linear ? 0.0 : p.amplitude * std::sin(2.0 * M_PI * freq * u);
          if (linear && std::abs(v) < p.margin / 2.0) continue;
          if ((v > boundary ? 1 : 0) == y) break;
        }
        x(static_cast<Eigen::Index>(row), 0) = u + (g == 0 ? -kGroupOffset : kGroupOffset);
        x(static_cast<Eigen::Index>(row), 1) = v;
        labels[row] = y;
        groups[row] = g;
        ++row;
      }
    }
  }

  const auto flips = static_cast<std::size_t>(std::llround(p.noise * static_cast<double>(cell)));
  if (flips > 0) {
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t r : rng.choose(cell, flips)) {
        labels[c * cell + r] = 1 - labels[c * cell + r];
      }
    }
  }
  return GroupedDataset(std::move(x), std::move(labels), std::move(groups), {"y0", "y1"},
                        {"simple", "complex"});
}

GroupedDataset gen_class_blobs(int num_classes, int dim, std::size_t per_class,
                               double separation, double spread, std::uint64_t seed) {
  if (num_classes < 2 || dim < 1 || per_class < 1) {
    throw InvalidParameterError("blobs need >= 2 classes, dim >= 1 and >= 1 sample per class");
  }
  if (!(spread >= 0.0) || !(separation >= 0.0)) {
    throw InvalidParameterError("blob spread and separation must be >= 0");
  }
  Rng rng(seed);
  RowMatrix means(num_classes, dim);
  for (int c = 0; c < num_classes; ++c) {
    for (int j = 0; j < dim; ++j) means(c, j) = separation * rng.normal();
  }
  const auto n = static_cast<std::size_t>(num_classes) * per_class;
  RowMatrix x(static_cast<Eigen::Index>(n), dim);
  std::vector<int> labels(n);
  std::size_t row = 0;
  for (int c = 0; c < num_classes; ++c) {
    for (std::size_t k = 0; k < per_class; ++k, ++row) {
      for (int j = 0; j < dim; ++j) {
        x(static_cast<Eigen::Index>(row), j) = means(c, j) + spread * rng.normal();
      }
      labels[row] = c;
    }
  }
  return GroupedDataset(std::move(x), std::move(labels), std::vector<int>(n, 0));
}

namespace {

std::uint64_t fingerprint(const RowMatrix& m) {
  const auto* bytes = reinterpret_cast<const char*>(m.data());
  return fnv1a(std::string_view(bytes, static_cast<std::size_t>(m.size()) * sizeof(double)),
               fnv1a(std::to_string(m.rows()) + "x" + std::to_string(m.cols())));
}

}  // namespace

GroupedDataset stitch_binary_task(const ClassPair& pair_a, const ClassPair& pair_b,
                                  std::uint64_t seed) {
  const std::array<const RowMatrix*, 4> slices{&pair_a.label0, &pair_a.label1, &pair_b.label0,
                                               &pair_b.label1};
  Eigen::Index keep = slices[0]->rows();
  for (const auto* s : slices) {
    if (s->rows() == 0) throw EmptyDataError("stitch_binary_task: empty class slice");
    if (s->cols() != slices[0]->cols()) {
      throw ShapeError("stitch_binary_task: slices differ in feature dimension");
    }
    keep = std::min(keep, s->rows());
  }
  RowMatrix x(4 * keep, slices[0]->cols());
  std::vector<int> labels;
  std::vector<int> groups;
  for (std::size_t s = 0; s < 4; ++s) {
    const RowMatrix& slice = *slices[s];
    Rng rng(splitmix64(seed ^ fingerprint(slice)));
    const auto rows = rng.choose(static_cast<std::size_t>(slice.rows()), static_cast<std::size_t>(keep));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      x.row(static_cast<Eigen::Index>(s) * keep + static_cast<Eigen::Index>(k)) =
          slice.row(static_cast<Eigen::Index>(rows[k]));
      labels.push_back(static_cast<int>(s % 2));
      groups.push_back(static_cast<int>(s / 2));
    }
  }
  return GroupedDataset(std::move(x), std::move(labels), std::move(groups), {"y0", "y1"},
                        {"a", "b"});
}

GroupedDataset stitch_binary_task(const GroupedDataset& ds, std::array<int, 2> pair_a,
                                  std::array<int, 2> pair_b, std::uint64_t seed) {
  auto slice = [&](int cls) {
    if (cls < 0 || cls >= ds.num_classes()) {
      throw ClassError("stitch_binary_task: unknown class " + std::to_string(cls));
    }
    const auto rows = ds.rows_of_label(cls);
    return ds.subset(rows).features();
  };
  const int distinct[4] = {pair_a[0], pair_a[1], pair_b[0], pair_b[1]};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (distinct[i] == distinct[j]) throw ClassError("stitch_binary_task: class slices must be disjoint");
    }
  }
  GroupedDataset out = stitch_binary_task(ClassPair{slice(pair_a[0]), slice(pair_a[1])},
                                          ClassPair{slice(pair_b[0]), slice(pair_b[1])}, seed);
  const auto& cn = ds.class_names();
  std::vector<std::string> gnames{cn[static_cast<std::size_t>(pair_a[0])] + "/" + cn[static_cast<std::size_t>(pair_a[1])],
                                  cn[static_cast<std::size_t>(pair_b[0])] + "/" + cn[static_cast<std::size_t>(pair_b[1])]};
  return GroupedDataset(out.features(), out.labels(), out.groups(), out.class_names(),
                        std::move(gnames));
}

}  // namespace amplab::data
