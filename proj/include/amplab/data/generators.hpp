#pragma once

#include <array>
#include <cstdint>

#include "amplab/data/dataset.hpp"

namespace amplab::data {

// Two-group binary task in the plane. Each group lives in its own
// 2x2 square (group 0 left of the origin, group 1 right) with local
// coordinates (u, v) in [-1, 1]^2:
//   group 0: label = v > 0, rows with |v| < margin/2 are rejected
//   group 1: label = v > amplitude * sin(2 pi frequency u)
// Setting easy_frequency > 0 gives group 0 the sine geometry too, which
// yields two statistically identical groups when it equals `frequency`.
// Noise flips exactly round(noise * n/4) labels in every (group, label)
// cell, in both directions, so cell counts stay at n/4.
struct TeaserParams {
  std::size_t n = 2000;
  double margin = 0.1;
  double frequency = 1.5;
  double noise = 0.0;
  std::uint64_t seed = 0;
  double amplitude = 0.5;
  double easy_frequency = 0.0;
};

GroupedDataset gen_teaser_task(const TeaserParams& params);

// Single-group multi-class Gaussian blobs: class means ~ N(0, I) scaled
// by `separation`, samples = mean + spread * N(0, I).
GroupedDataset gen_class_blobs(int num_classes, int dim, std::size_t per_class,
                               double separation, double spread, std::uint64_t seed);

// Binary task from two class pairs: label 0 = {a0, b0}, label 1 = {a1, b1},
// group 0 = pair a, group 1 = pair b. Every slice is subsampled to the
// smallest slice size. Subsampling is keyed on the slice contents and
// `seed`, so swapping the pairs only swaps group ids.
struct ClassPair {
  RowMatrix label0;
  RowMatrix label1;
};

GroupedDataset stitch_binary_task(const ClassPair& pair_a, const ClassPair& pair_b,
                                  std::uint64_t seed);

// Same, taking the four classes out of a labelled dataset.
GroupedDataset stitch_binary_task(const GroupedDataset& ds, std::array<int, 2> pair_a,
                                  std::array<int, 2> pair_b, std::uint64_t seed);

}  // namespace amplab::data
