#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "amplab/data/dataset.hpp"

namespace amplab::data {

// How mini-batch rows are drawn during training.
struct Sampler {
  enum class Mode { uniform, weighted };

  Mode mode = Mode::uniform;
  std::vector<double> weights;  // one per row, weighted mode only
  std::uint64_t seed = 0;

  static Sampler uniform(std::uint64_t seed) { return {Mode::uniform, {}, seed}; }
  // Throws InvalidParameterError unless weights are finite, >= 0 and not all zero.
  static Sampler weighted(std::vector<double> weights, std::uint64_t seed);
};

// Stream of row indices consumed by the trainer.
class BatchSource {
 public:
  virtual ~BatchSource() = default;
  // Appends `count` row indices to `out` (after clearing it).
  virtual void next(std::size_t count, std::vector<std::size_t>& out) = 0;
};

// Uniform mode: one fresh permutation per pass over the data. Weighted
// mode: independent draws with replacement, P(row i) = w_i / sum(w).
std::unique_ptr<BatchSource> make_batch_source(const Sampler& sampler, std::size_t rows);

// Weight `weight` on every row of `group`, 1 elsewhere.
Sampler oversample_weights(const GroupedDataset& ds, int group, double weight,
                           std::uint64_t seed);

}  // namespace amplab::data
