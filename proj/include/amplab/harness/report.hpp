#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "amplab/harness/amplification.hpp"
#include "amplab/harness/mitigation.hpp"
#include "amplab/harness/pairwise.hpp"
#include "amplab/harness/protocols.hpp"
#include "amplab/metrics/disparity.hpp"

namespace amplab::harness {

// Disparity reports and per-step trajectories of one audit.
struct AuditSummary {
  std::vector<metrics::DisparityReport> reports;
  std::vector<std::vector<TrajectoryPoint>> trajectories;  // parallel to reports

  static AuditSummary from(const AuditResult& result);
};

// Everything one CLI run can produce; absent sections are written as null.
struct ReportBundle {
  std::string subcommand;
  std::string config_hash;
  std::optional<AuditSummary> audit;
  std::optional<AmplificationReport> amplification;
  std::optional<SweepResult> sweep;
  std::optional<MitigationResult> mitigation;
  std::optional<PairwiseResult> pairwise;
};

inline constexpr const char* kReportSchema = "amplab-report/1";

nlohmann::json to_json(const ReportBundle& bundle);
// Throws SchemaError on a malformed document.
ReportBundle bundle_from_json(const nlohmann::json& doc);

// Writes report.json and the CSV tables into `dir`:
//   disparity.csv             source,group_a,group_b,name_a,name_b,checkpoint,...
//   trajectory.csv            group_a,group_b,step,d_mean,d_stderr
//   amplification_records.csv task_id,knob,d_tilde,d,s_a0_a1,s_b0_b1,s_a0_b1,s_a1_b0
//   amplification_fit.csv     fit,term,coefficient,stderr,r_squared,n,p
//   sweep.csv                 variable,value,k,k_stderr,r_squared,k_intercept,k_intercept_stderr
//   mitigation.csv            strategy,group_a,group_b,run,d_before,d_after
//   tau.csv                   model x model Kendall tau
//   pairwise_ranks.csv        class_i,class_j,distance,distance_rank,acc_<k>,rank_<k>...
//   pairwise_model<k>.csv     one masked-accuracy matrix per model
// Tables without data keep their header row. Returns the file names written,
// in write order. Throws IoError naming the path on failure.
std::vector<std::string> emit_report(const ReportBundle& bundle, const std::filesystem::path& dir);

// Reads report.json from `dir` (or a file path).
ReportBundle read_report(const std::filesystem::path& path);

// 16 hex digits of FNV-1a over a file's bytes.
std::string file_checksum(const std::filesystem::path& path);

struct ManifestInfo {
  std::string run_id;
  std::string subcommand;
  std::string config_hash;
  std::string config_text;  // canonical key = value lines
  std::vector<std::filesystem::path> inputs;
  std::vector<std::string> artifacts;  // file names inside the run directory
};

// manifest.json with input and artifact checksums. The "created" field is
// the only time-dependent content.
void write_manifest(const std::filesystem::path& dir, const ManifestInfo& info);

}  // namespace amplab::harness
