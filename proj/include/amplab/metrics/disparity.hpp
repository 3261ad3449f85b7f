#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace amplab::metrics {

// Below this |d_tilde| the ratio d / d_tilde is reported as undefined.
inline constexpr double kRatioDegeneracyThreshold = 0.005;

// Accuracies of one quantity over independent runs.
struct AccuracySummary {
  std::vector<double> runs;
  double mean = 0.0;
  std::optional<double> stderr_;  // undefined for a single run

  static AccuracySummary from_runs(std::vector<double> runs);
};

double estimated_disparity(double acc_alpha_isolated, double acc_beta_isolated);
double observed_disparity(double acc_alpha_combined, double acc_beta_combined);
std::optional<double> amplification_ratio(double d, double d_tilde);

// Disparities for one group pair at one training checkpoint choice.
struct DisparityView {
  AccuracySummary iso_a, iso_b;    // each group trained and tested alone
  AccuracySummary comb_a, comb_b;  // one model trained on both groups
  double d_tilde = 0.0;
  double d = 0.0;
  std::optional<double> k_ratio;
  // Standard error of d - d_tilde, treating the four means as independent.
  std::optional<double> pooled_stderr;
  // Observed disparity exceeds the estimate, in the direction of d_tilde,
  // by more than two pooled standard errors (plain comparison when the
  // standard error is undefined).
  bool amplified = false;

  static DisparityView make(AccuracySummary iso_a, AccuracySummary iso_b,
                            AccuracySummary comb_a, AccuracySummary comb_b);
  DisparityView swapped() const;
};

struct DisparityReport {
  int group_a = 0;
  int group_b = 1;
  std::string name_a, name_b;
  DisparityView early_stopped;  // best-validation checkpoints (headline)
  DisparityView final;          // last checkpoints

  DisparityReport swapped() const;
};

// Binary accuracies between (group, label) cells, in regression column order.
struct SeparabilityVector {
  static constexpr std::array<const char*, 4> kColumns = {"s_a0_a1", "s_b0_b1", "s_a0_b1",
                                                          "s_a1_b0"};
  double s_a0_a1 = 0.0;
  double s_b0_b1 = 0.0;
  double s_a0_b1 = 0.0;
  double s_a1_b0 = 0.0;
  std::array<std::size_t, 4> run_counts{};
  std::vector<std::uint64_t> seeds;

  std::array<double, 4> values() const { return {s_a0_a1, s_b0_b1, s_a0_b1, s_a1_b0}; }
};

// Raw inputs for separability_cells; any cell may be missing.
struct CellMeasurements {
  std::optional<AccuracySummary> a0_a1, b0_b1, a0_b1, a1_b0;
  std::vector<std::uint64_t> seeds;
};

// Throws IncompleteProtocolError naming any missing cell.
SeparabilityVector separability_cells(const CellMeasurements& cells);

}  // namespace amplab::metrics
