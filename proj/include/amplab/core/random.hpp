#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace amplab {

std::uint64_t splitmix64(std::uint64_t x);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Seed for run `index` of the condition named `key` under a base seed.
// Distinct keys give unrelated streams.
std::uint64_t derive_seed(std::uint64_t base, std::string_view key, std::uint64_t index = 0);

// Thin wrapper over mt19937_64 with distribution code we own, so the
// streams do not depend on the standard library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n > 0.
  std::size_t index(std::size_t n);

  // Standard normal via Box-Muller (no cached second value).
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  // `k` distinct positions out of [0, n), returned in ascending order.
  std::vector<std::size_t> choose(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace amplab
