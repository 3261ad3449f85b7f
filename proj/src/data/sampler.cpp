#include "amplab/data/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"

namespace amplab::data {

Sampler Sampler::weighted(std::vector<double> weights, std::uint64_t seed) {
  bool any_positive = false;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidParameterError("sampler weights must be finite and >= 0");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw InvalidParameterError("sampler needs at least one positive weight");
  return {Mode::weighted, std::move(weights), seed};
}

namespace {

class UniformSource final : public BatchSource {
 public:
  UniformSource(std::size_t rows, std::uint64_t seed) : rng_(seed), order_(rows) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    pos_ = rows;  // forces a shuffle on first use
  }

  void next(std::size_t count, std::vector<std::size_t>& out) override {
    out.clear();
    while (out.size() < count) {
      if (pos_ == order_.size()) {
        rng_.shuffle(order_);
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
  }

 private:
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

class WeightedSource final : public BatchSource {
 public:
  WeightedSource(const std::vector<double>& weights, std::uint64_t seed) : rng_(seed) {
    cumulative_.resize(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cumulative_.begin());
  }

  void next(std::size_t count, std::vector<std::size_t>& out) override {
    out.clear();
    const double total = cumulative_.back();
    for (std::size_t k = 0; k < count; ++k) {
      const double target = rng_.uniform() * total;
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
      // Zero-weight rows share a cumulative value with their predecessor and are never hit.
      out.push_back(static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                   static_cast<std::ptrdiff_t>(cumulative_.size()) - 1)));
    }
  }

 private:
  Rng rng_;
  std::vector<double> cumulative_;
};

}  // namespace

std::unique_ptr<BatchSource> make_batch_source(const Sampler& sampler, std::size_t rows) {
  if (rows == 0) throw EmptyDataError("batch source over zero rows");
  if (sampler.mode == Sampler::Mode::uniform) {
    return std::make_unique<UniformSource>(rows, sampler.seed);
  }
  if (sampler.weights.size() != rows) {
    throw ShapeError("sampler has " + std::to_string(sampler.weights.size()) +
                     " weights for " + std::to_string(rows) + " rows");
  }
  return std::make_unique<WeightedSource>(sampler.weights, sampler.seed);
}

Sampler oversample_weights(const GroupedDataset& ds, int group, double weight,
                           std::uint64_t seed) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InvalidParameterError("oversampling weight must be > 0");
  }
  if (group < 0 || group >= ds.num_groups()) {
    throw GroupError("unknown group id " + std::to_string(group));
  }
  std::vector<double> w(ds.size(), 1.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.groups()[i] == group) w[i] = weight;
  }
  return Sampler::weighted(std::move(w), seed);
}

}  // namespace amplab::data
