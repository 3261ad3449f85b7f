#include "amplab/metrics/disparity.hpp"

#include <cmath>
#include <numeric>

#include "amplab/core/error.hpp"

namespace amplab::metrics {

AccuracySummary AccuracySummary::from_runs(std::vector<double> runs) {
  AccuracySummary s;
  s.runs = std::move(runs);
  if (s.runs.empty()) return s;
  const auto n = static_cast<double>(s.runs.size());
  s.mean = std::accumulate(s.runs.begin(), s.runs.end(), 0.0) / n;
  if (s.runs.size() > 1) {
    double ss = 0.0;
    for (double v : s.runs) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

double estimated_disparity(double acc_alpha_isolated, double acc_beta_isolated) {
  return acc_alpha_isolated - acc_beta_isolated;
}

double observed_disparity(double acc_alpha_combined, double acc_beta_combined) {
  return acc_alpha_combined - acc_beta_combined;
}

std::optional<double> amplification_ratio(double d, double d_tilde) {
  if (!(std::abs(d_tilde) >= kRatioDegeneracyThreshold)) return std::nullopt;
  return d / d_tilde;
}

DisparityView DisparityView::make(AccuracySummary iso_a, AccuracySummary iso_b,
                                  AccuracySummary comb_a, AccuracySummary comb_b) {
  DisparityView v;
  v.d_tilde = estimated_disparity(iso_a.mean, iso_b.mean);
  v.d = observed_disparity(comb_a.mean, comb_b.mean);
  v.k_ratio = amplification_ratio(v.d, v.d_tilde);
  if (iso_a.stderr_ && iso_b.stderr_ && comb_a.stderr_ && comb_b.stderr_) {
    v.pooled_stderr = std::sqrt(*iso_a.stderr_ * *iso_a.stderr_ + *iso_b.stderr_ * *iso_b.stderr_ +
                                *comb_a.stderr_ * *comb_a.stderr_ +
                                *comb_b.stderr_ * *comb_b.stderr_);
  }
  // Orient along d_tilde so the flag is symmetric under a group swap.
  const double excess = v.d_tilde == 0.0 ? std::abs(v.d) : std::copysign(1.0, v.d_tilde) * (v.d - v.d_tilde);
  v.amplified = v.pooled_stderr ? excess > 2.0 * *v.pooled_stderr : excess > 0.0;
  v.iso_a = std::move(iso_a);
  v.iso_b = std::move(iso_b);
  v.comb_a = std::move(comb_a);
  v.comb_b = std::move(comb_b);
  return v;
}

DisparityView DisparityView::swapped() const {
  DisparityView v = *this;
  std::swap(v.iso_a, v.iso_b);
  std::swap(v.comb_a, v.comb_b);
  v.d_tilde = estimated_disparity(v.iso_a.mean, v.iso_b.mean);
  v.d = observed_disparity(v.comb_a.mean, v.comb_b.mean);
  v.k_ratio = amplification_ratio(v.d, v.d_tilde);
  return v;
}

DisparityReport DisparityReport::swapped() const {
  DisparityReport r = *this;
  std::swap(r.group_a, r.group_b);
  std::swap(r.name_a, r.name_b);
  r.early_stopped = early_stopped.swapped();
  r.final = final.swapped();
  return r;
}

SeparabilityVector separability_cells(const CellMeasurements& cells) {
  std::string missing;
  const std::array<const std::optional<AccuracySummary>*, 4> all{&cells.a0_a1, &cells.b0_b1,
                                                                  &cells.a0_b1, &cells.a1_b0};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!all[i]->has_value() || (*all[i])->runs.empty()) {
      missing += std::string(missing.empty() ? "" : ", ") + SeparabilityVector::kColumns[i];
    }
  }
  if (!missing.empty()) throw IncompleteProtocolError("separability cells missing: " + missing);
  SeparabilityVector s;
  s.s_a0_a1 = cells.a0_a1->mean;
  s.s_b0_b1 = cells.b0_b1->mean;
  s.s_a0_b1 = cells.a0_b1->mean;
  s.s_a1_b0 = cells.a1_b0->mean;
  for (std::size_t i = 0; i < all.size(); ++i) s.run_counts[i] = (*all[i])->runs.size();
  s.seeds = cells.seeds;
  return s;
}

}  // namespace amplab::metrics
