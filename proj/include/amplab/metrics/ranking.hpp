#pragma once

#include <span>
#include <vector>

namespace amplab::metrics {

// Ranks 1..n; tied values share the average of their positions.
std::vector<double> rank_transform(std::span<const double> v);

// Kendall's tau-b. Throws ShapeError on length mismatch or fewer than two
// entries; returns 0 when either vector is constant (tau-b is undefined).
double kendall_tau(std::span<const double> a, std::span<const double> b);

}  // namespace amplab::metrics
