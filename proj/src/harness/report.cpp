#include "amplab/harness/report.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"

namespace amplab::harness {

using nlohmann::json;

AuditSummary AuditSummary::from(const AuditResult& result) {
  return {result.reports, result.trajectories};
}

namespace {

// ---- json helpers -------------------------------------------------------

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd get_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd get_mat(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(m.cols())) throw SchemaError("ragged matrix in report");
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return m;
}

json summary_json(const metrics::AccuracySummary& s) {
  return {{"runs", s.runs}, {"mean", s.mean}, {"stderr", opt(s.stderr_)}};
}

metrics::AccuracySummary summary_from(const json& j) {
  metrics::AccuracySummary s;
  s.runs = j.at("runs").get<std::vector<double>>();
  s.mean = j.at("mean").get<double>();
  s.stderr_ = get_opt(j.at("stderr"));
  return s;
}

json view_json(const metrics::DisparityView& v) {
  return {{"iso_a", summary_json(v.iso_a)},   {"iso_b", summary_json(v.iso_b)},
          {"comb_a", summary_json(v.comb_a)}, {"comb_b", summary_json(v.comb_b)},
          {"d_tilde", v.d_tilde},             {"d", v.d},
          {"k_ratio", opt(v.k_ratio)},        {"pooled_stderr", opt(v.pooled_stderr)},
          {"amplified", v.amplified}};
}

metrics::DisparityView view_from(const json& j) {
  metrics::DisparityView v;
  v.iso_a = summary_from(j.at("iso_a"));
  v.iso_b = summary_from(j.at("iso_b"));
  v.comb_a = summary_from(j.at("comb_a"));
  v.comb_b = summary_from(j.at("comb_b"));
  v.d_tilde = j.at("d_tilde").get<double>();
  v.d = j.at("d").get<double>();
  v.k_ratio = get_opt(j.at("k_ratio"));
  v.pooled_stderr = get_opt(j.at("pooled_stderr"));
  v.amplified = j.at("amplified").get<bool>();
  return v;
}

json report_json(const metrics::DisparityReport& r) {
  return {{"group_a", r.group_a},
          {"group_b", r.group_b},
          {"name_a", r.name_a},
          {"name_b", r.name_b},
          {"early_stopped", view_json(r.early_stopped)},
          {"final", view_json(r.final)}};
}

metrics::DisparityReport report_from(const json& j) {
  metrics::DisparityReport r;
  r.group_a = j.at("group_a").get<int>();
  r.group_b = j.at("group_b").get<int>();
  r.name_a = j.at("name_a").get<std::string>();
  r.name_b = j.at("name_b").get<std::string>();
  r.early_stopped = view_from(j.at("early_stopped"));
  r.final = view_from(j.at("final"));
  return r;
}

json reports_json(const std::vector<metrics::DisparityReport>& rs) {
  json a = json::array();
  for (const auto& r : rs) a.push_back(report_json(r));
  return a;
}

std::vector<metrics::DisparityReport> reports_from(const json& j) {
  std::vector<metrics::DisparityReport> out;
  for (const auto& r : j) out.push_back(report_from(r));
  return out;
}

json trajectory_json(const std::vector<TrajectoryPoint>& t) {
  json a = json::array();
  for (const auto& p : t) a.push_back({{"step", p.step}, {"d_mean", p.d_mean}, {"d_stderr", opt(p.d_stderr)}});
  return a;
}

std::vector<TrajectoryPoint> trajectory_from(const json& j) {
  std::vector<TrajectoryPoint> out;
  for (const auto& p : j) {
    out.push_back({p.at("step").get<std::int64_t>(), p.at("d_mean").get<double>(), get_opt(p.at("d_stderr"))});
  }
  return out;
}

json audit_json(const AuditSummary& a) {
  json t = json::array();
  for (const auto& tr : a.trajectories) t.push_back(trajectory_json(tr));
  return {{"reports", reports_json(a.reports)}, {"trajectories", t}};
}

AuditSummary audit_from(const json& j) {
  AuditSummary a;
  a.reports = reports_from(j.at("reports"));
  for (const auto& t : j.at("trajectories")) a.trajectories.push_back(trajectory_from(t));
  return a;
}

json cells_json(const metrics::SeparabilityVector& s) {
  return {{"s_a0_a1", s.s_a0_a1}, {"s_b0_b1", s.s_b0_b1},   {"s_a0_b1", s.s_a0_b1},
          {"s_a1_b0", s.s_a1_b0}, {"run_counts", s.run_counts}, {"seeds", s.seeds}};
}

metrics::SeparabilityVector cells_from(const json& j) {
  metrics::SeparabilityVector s;
  s.s_a0_a1 = j.at("s_a0_a1").get<double>();
  s.s_b0_b1 = j.at("s_b0_b1").get<double>();
  s.s_a0_b1 = j.at("s_a0_b1").get<double>();
  s.s_a1_b0 = j.at("s_a1_b0").get<double>();
  s.run_counts = j.at("run_counts").get<std::array<std::size_t, 4>>();
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  return s;
}

json record_json(const TaskRecord& r) {
  return {{"task_id", r.task_id}, {"knob", r.knob},   {"d_tilde", r.d_tilde},
          {"d", r.d},             {"cells", cells_json(r.cells)}, {"seeds", r.seeds},
          {"d_trajectory", trajectory_json(r.d_trajectory)}};
}

TaskRecord record_from(const json& j) {
  TaskRecord r;
  r.task_id = j.at("task_id").get<std::size_t>();
  r.knob = j.at("knob").get<double>();
  r.d_tilde = j.at("d_tilde").get<double>();
  r.d = j.at("d").get<double>();
  r.cells = cells_from(j.at("cells"));
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  r.d_trajectory = trajectory_from(j.at("d_trajectory"));
  return r;
}

json regression_json(const stats::RegressionResult& r) {
  return {{"names", r.names},         {"coefficients", vec(r.coefficients)},
          {"standard_errors", vec(r.standard_errors)}, {"r_squared", r.r_squared},
          {"residuals", vec(r.residuals)}, {"fitted", vec(r.fitted)},
          {"n", r.n},                 {"p", r.p},
          {"has_intercept", r.has_intercept}};
}

stats::RegressionResult regression_from(const json& j) {
  stats::RegressionResult r;
  r.names = j.at("names").get<std::vector<std::string>>();
  r.coefficients = get_vec(j.at("coefficients"));
  r.standard_errors = get_vec(j.at("standard_errors"));
  r.r_squared = j.at("r_squared").get<double>();
  r.residuals = get_vec(j.at("residuals"));
  r.fitted = get_vec(j.at("fitted"));
  r.n = j.at("n").get<std::size_t>();
  r.p = j.at("p").get<std::size_t>();
  r.has_intercept = j.at("has_intercept").get<bool>();
  return r;
}

json fit_json(const AmplificationFit& f) {
  return {{"k", f.k},
          {"k_stderr", f.k_stderr},
          {"r_squared", f.r_squared},
          {"no_intercept", regression_json(f.no_intercept)},
          {"with_intercept", regression_json(f.with_intercept)},
          {"d_tilde_only", regression_json(f.d_tilde_only)},
          {"dropped_no_intercept", f.dropped_no_intercept},
          {"dropped_with_intercept", f.dropped_with_intercept}};
}

AmplificationFit fit_from(const json& j) {
  AmplificationFit f;
  f.k = j.at("k").get<double>();
  f.k_stderr = j.at("k_stderr").get<double>();
  f.r_squared = j.at("r_squared").get<double>();
  f.no_intercept = regression_from(j.at("no_intercept"));
  f.with_intercept = regression_from(j.at("with_intercept"));
  f.d_tilde_only = regression_from(j.at("d_tilde_only"));
  f.dropped_no_intercept = j.at("dropped_no_intercept").get<std::vector<std::string>>();
  f.dropped_with_intercept = j.at("dropped_with_intercept").get<std::vector<std::string>>();
  return f;
}

json amplification_json(const AmplificationReport& a) {
  json recs = json::array();
  for (const auto& r : a.records) recs.push_back(record_json(r));
  return {{"records", recs}, {"fit", fit_json(a.fit)}};
}

AmplificationReport amplification_from(const json& j) {
  AmplificationReport a;
  for (const auto& r : j.at("records")) a.records.push_back(record_from(r));
  a.fit = fit_from(j.at("fit"));
  return a;
}

json sweep_json(const SweepResult& s) {
  json pts = json::array();
  for (const auto& p : s.points) {
    pts.push_back({{"value", p.value},
                   {"k", p.k},
                   {"k_stderr", p.k_stderr},
                   {"r_squared", p.r_squared},
                   {"k_intercept", p.k_intercept},
                   {"k_intercept_stderr", p.k_intercept_stderr}});
  }
  json reps = json::array();
  for (const auto& r : s.reports) reps.push_back(amplification_json(r));
  return {{"variable", s.variable}, {"grid", s.grid}, {"points", pts}, {"reports", reps}};
}

SweepResult sweep_from(const json& j) {
  SweepResult s;
  s.variable = j.at("variable").get<std::string>();
  s.grid = j.at("grid").get<std::vector<double>>();
  for (const auto& p : j.at("points")) {
    s.points.push_back({p.at("value").get<double>(), p.at("k").get<double>(),
                        p.at("k_stderr").get<double>(), p.at("r_squared").get<double>(),
                        p.at("k_intercept").get<double>(), p.at("k_intercept_stderr").get<double>()});
  }
  for (const auto& r : j.at("reports")) s.reports.push_back(amplification_from(r));
  return s;
}

json mitigation_json(const MitigationResult& m) {
  json deltas = json::array();
  for (const auto& d : m.deltas) {
    deltas.push_back({{"group_a", d.group_a},
                      {"group_b", d.group_b},
                      {"d_before", d.d_before},
                      {"d_after", d.d_after},
                      {"mean_before", d.mean_before},
                      {"mean_after", d.mean_after},
                      {"delta", d.delta}});
  }
  return {{"strategy",
           {{"kind", m.strategy.kind == MitigationStrategy::Kind::oversample ? "oversample" : "add_data"},
            {"amount", m.strategy.amount},
            {"target_group", m.strategy.target_group}}},
          {"before", reports_json(m.before)},
          {"after", reports_json(m.after)},
          {"deltas", deltas}};
}

MitigationResult mitigation_from(const json& j) {
  MitigationResult m;
  const auto& s = j.at("strategy");
  const auto kind = s.at("kind").get<std::string>();
  if (kind != "oversample" && kind != "add_data") throw SchemaError("unknown mitigation kind " + kind);
  m.strategy.kind = kind == "oversample" ? MitigationStrategy::Kind::oversample
                                         : MitigationStrategy::Kind::add_data;
  m.strategy.amount = s.at("amount").get<double>();
  m.strategy.target_group = s.at("target_group").get<int>();
  m.before = reports_from(j.at("before"));
  m.after = reports_from(j.at("after"));
  for (const auto& d : j.at("deltas")) {
    PairDelta pd;
    pd.group_a = d.at("group_a").get<int>();
    pd.group_b = d.at("group_b").get<int>();
    pd.d_before = d.at("d_before").get<std::vector<double>>();
    pd.d_after = d.at("d_after").get<std::vector<double>>();
    pd.mean_before = d.at("mean_before").get<double>();
    pd.mean_after = d.at("mean_after").get<double>();
    pd.delta = d.at("delta").get<double>();
    m.deltas.push_back(std::move(pd));
  }
  return m;
}

json pls_json(const stats::PlsModel& p) {
  return {{"x_weights", vec(p.x_weights)}, {"x_loadings", vec(p.x_loadings)},
          {"y_loading", p.y_loading},      {"x_mean", vec(p.x_mean)},
          {"y_mean", p.y_mean},            {"scores", vec(p.scores)},
          {"r_squared", p.r_squared}};
}

stats::PlsModel pls_from(const json& j) {
  stats::PlsModel p;
  p.x_weights = get_vec(j.at("x_weights"));
  p.x_loadings = get_vec(j.at("x_loadings"));
  p.y_loading = j.at("y_loading").get<double>();
  p.x_mean = get_vec(j.at("x_mean"));
  p.y_mean = j.at("y_mean").get<double>();
  p.scores = get_vec(j.at("scores"));
  p.r_squared = j.at("r_squared").get<double>();
  return p;
}

json pairwise_json(const PairwiseResult& p) {
  json specs = json::array();
  for (const auto& s : p.specs) specs.push_back(nn::spec_to_string(s));
  json mats = json::array();
  for (const auto& m : p.matrices) mats.push_back(mat(m));
  const auto& a = p.analysis;
  json pairs = json::array();
  for (const auto& [i, j] : a.pairs) pairs.push_back({i, j});
  return {{"specs", specs},
          {"class_names", p.class_names},
          {"matrices", mats},
          {"analysis",
           {{"pairs", pairs},
            {"accuracies", a.accuracies},
            {"accuracy_ranks", a.accuracy_ranks},
            {"distances", a.distances},
            {"distance_ranks", a.distance_ranks},
            {"tau", mat(a.tau)},
            {"pls", pls_json(a.pls)},
            {"r_squared", a.r_squared}}}};
}

PairwiseResult pairwise_from(const json& j) {
  PairwiseResult p;
  for (const auto& s : j.at("specs")) p.specs.push_back(nn::spec_from_string(s.get<std::string>()));
  p.class_names = j.at("class_names").get<std::vector<std::string>>();
  for (const auto& m : j.at("matrices")) p.matrices.push_back(get_mat(m));
  const auto& a = j.at("analysis");
  for (const auto& pr : a.at("pairs")) p.analysis.pairs.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
  p.analysis.accuracies = a.at("accuracies").get<std::vector<std::vector<double>>>();
  p.analysis.accuracy_ranks = a.at("accuracy_ranks").get<std::vector<std::vector<double>>>();
  p.analysis.distances = a.at("distances").get<std::vector<double>>();
  p.analysis.distance_ranks = a.at("distance_ranks").get<std::vector<double>>();
  p.analysis.tau = get_mat(a.at("tau"));
  p.analysis.pls = pls_from(a.at("pls"));
  p.analysis.r_squared = a.at("r_squared").get<double>();
  return p;
}

template <typename T, typename F>
json section(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : json(nullptr);
}

// ---- csv helpers --------------------------------------------------------

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) { add(std::move(header)); }
  void add(const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) text_ += (i ? "," : "") + csv_field(row[i]);
    text_ += "\n";
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

void disparity_rows(Table& t, const std::string& source,
                    const std::vector<metrics::DisparityReport>& reports) {
  for (const auto& r : reports) {
    for (const auto& [label, v] : {std::pair<const char*, const metrics::DisparityView*>{"early_stopped", &r.early_stopped},
                                   {"final", &r.final}}) {
      t.add({source, std::to_string(r.group_a), std::to_string(r.group_b), r.name_a, r.name_b, label,
             num(v->iso_a.mean), num(v->iso_b.mean), num(v->comb_a.mean), num(v->comb_b.mean),
             num(v->d_tilde), num(v->d), num(v->k_ratio), num(v->pooled_stderr),
             v->amplified ? "1" : "0"});
    }
  }
}

}  // namespace

json to_json(const ReportBundle& b) {
  json doc;
  doc["schema"] = kReportSchema;
  doc["subcommand"] = b.subcommand;
  doc["config_hash"] = b.config_hash;
  doc["audit"] = section(b.audit, audit_json);
  doc["amplification"] = section(b.amplification, amplification_json);
  doc["sweep"] = section(b.sweep, sweep_json);
  doc["mitigation"] = section(b.mitigation, mitigation_json);
  doc["pairwise"] = section(b.pairwise, pairwise_json);
  return doc;
}

ReportBundle bundle_from_json(const json& doc) {
  try {
    if (doc.at("schema").get<std::string>() != kReportSchema) {
      throw SchemaError("unsupported report schema " + doc.at("schema").dump());
    }
    ReportBundle b;
    b.subcommand = doc.at("subcommand").get<std::string>();
    b.config_hash = doc.at("config_hash").get<std::string>();
    if (!doc.at("audit").is_null()) b.audit = audit_from(doc.at("audit"));
    if (!doc.at("amplification").is_null()) b.amplification = amplification_from(doc.at("amplification"));
    if (!doc.at("sweep").is_null()) b.sweep = sweep_from(doc.at("sweep"));
    if (!doc.at("mitigation").is_null()) b.mitigation = mitigation_from(doc.at("mitigation"));
    if (!doc.at("pairwise").is_null()) b.pairwise = pairwise_from(doc.at("pairwise"));
    return b;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed report: ") + e.what());
  }
}

std::vector<std::string> emit_report(const ReportBundle& b, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    written.push_back(name);
  };

  emit("report.json", to_json(b).dump(2) + "\n");

  Table disparity({"source", "group_a", "group_b", "name_a", "name_b", "checkpoint", "iso_a", "iso_b",
                   "comb_a", "comb_b", "d_tilde", "d", "k_ratio", "pooled_stderr", "amplified"});
  Table trajectory({"group_a", "group_b", "step", "d_mean", "d_stderr"});
  if (b.audit) {
    disparity_rows(disparity, "audit", b.audit->reports);
    for (std::size_t i = 0; i < b.audit->reports.size() && i < b.audit->trajectories.size(); ++i) {
      const auto& r = b.audit->reports[i];
      for (const auto& p : b.audit->trajectories[i]) {
        trajectory.add({std::to_string(r.group_a), std::to_string(r.group_b), std::to_string(p.step),
                        num(p.d_mean), num(p.d_stderr)});
      }
    }
  }
  if (b.mitigation) {
    disparity_rows(disparity, "mitigation_before", b.mitigation->before);
    disparity_rows(disparity, "mitigation_after", b.mitigation->after);
  }
  emit("disparity.csv", disparity.text());
  emit("trajectory.csv", trajectory.text());

  Table records({"task_id", "knob", "d_tilde", "d", "s_a0_a1", "s_b0_b1", "s_a0_b1", "s_a1_b0"});
  Table fits({"fit", "term", "coefficient", "stderr", "r_squared", "n", "p"});
  auto fit_rows = [&](const std::string& prefix, const AmplificationFit& f) {
    for (const auto& [label, r] : {std::pair<const char*, const stats::RegressionResult*>{"no_intercept", &f.no_intercept},
                                   {"with_intercept", &f.with_intercept},
                                   {"d_tilde_only", &f.d_tilde_only}}) {
      for (std::size_t i = 0; i < r->names.size(); ++i) {
        fits.add({prefix + label, r->names[i], num(r->coefficients(static_cast<Eigen::Index>(i))),
                  num(r->standard_errors(static_cast<Eigen::Index>(i))), num(r->r_squared),
                  std::to_string(r->n), std::to_string(r->p)});
      }
    }
  };
  if (b.amplification) {
    for (const auto& r : b.amplification->records) {
      records.add({std::to_string(r.task_id), num(r.knob), num(r.d_tilde), num(r.d), num(r.cells.s_a0_a1),
                   num(r.cells.s_b0_b1), num(r.cells.s_a0_b1), num(r.cells.s_a1_b0)});
    }
    fit_rows("", b.amplification->fit);
  }
  emit("amplification_records.csv", records.text());
  emit("amplification_fit.csv", fits.text());

  Table sweep({"variable", "value", "k", "k_stderr", "r_squared", "k_intercept", "k_intercept_stderr"});
  if (b.sweep) {
    for (const auto& p : b.sweep->points) {
      sweep.add({b.sweep->variable, num(p.value), num(p.k), num(p.k_stderr), num(p.r_squared),
                 num(p.k_intercept), num(p.k_intercept_stderr)});
    }
  }
  emit("sweep.csv", sweep.text());

  Table mitigation({"strategy", "group_a", "group_b", "run", "d_before", "d_after"});
  if (b.mitigation) {
    for (const auto& d : b.mitigation->deltas) {
      for (std::size_t r = 0; r < d.d_before.size(); ++r) {
        mitigation.add({b.mitigation->strategy.name(), std::to_string(d.group_a), std::to_string(d.group_b),
                        std::to_string(r), num(d.d_before[r]), num(d.d_after[r])});
      }
    }
  }
  emit("mitigation.csv", mitigation.text());

  const std::size_t models = b.pairwise ? b.pairwise->matrices.size() : 0;
  std::vector<std::string> tau_header{"model"};
  std::vector<std::string> rank_header{"class_i", "class_j", "distance", "distance_rank"};
  for (std::size_t k = 0; k < models; ++k) {
    tau_header.push_back("model_" + std::to_string(k));
    rank_header.push_back("acc_" + std::to_string(k));
    rank_header.push_back("rank_" + std::to_string(k));
  }
  Table tau(tau_header);
  Table ranks(rank_header);
  if (b.pairwise) {
    const auto& a = b.pairwise->analysis;
    for (std::size_t k = 0; k < models; ++k) {
      std::vector<std::string> row{"model_" + std::to_string(k)};
      for (std::size_t l = 0; l < models; ++l) {
        row.push_back(num(a.tau(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l))));
      }
      tau.add(row);
    }
    const auto& names = b.pairwise->class_names;
    for (std::size_t p = 0; p < a.pairs.size(); ++p) {
      std::vector<std::string> row{names[static_cast<std::size_t>(a.pairs[p].first)],
                                   names[static_cast<std::size_t>(a.pairs[p].second)], num(a.distances[p]),
                                   num(a.distance_ranks[p])};
      for (std::size_t k = 0; k < models; ++k) {
        row.push_back(num(a.accuracies[k][p]));
        row.push_back(num(a.accuracy_ranks[k][p]));
      }
      ranks.add(row);
    }
  }
  emit("tau.csv", tau.text());
  emit("pairwise_ranks.csv", ranks.text());
  for (std::size_t k = 0; k < models; ++k) {
    const auto& m = b.pairwise->matrices[k];
    std::vector<std::string> header{"class"};
    header.insert(header.end(), b.pairwise->class_names.begin(), b.pairwise->class_names.end());
    Table t(header);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<std::string> row{b.pairwise->class_names[static_cast<std::size_t>(i)]};
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
      t.add(row);
    }
    emit("pairwise_model" + std::to_string(k) + ".csv", t.text());
  }
  return written;
}

ReportBundle read_report(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "report.json" : path;
  std::ifstream in(file);
  if (!in) throw IoError("cannot open report " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw SchemaError("cannot parse " + file.string() + ": " + e.what());
  }
  return bundle_from_json(doc);
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(ss.str())));
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const ManifestInfo& info) {
  json inputs = json::array();
  for (const auto& p : info.inputs) {
    inputs.push_back({{"path", p.string()}, {"checksum", file_checksum(p)}});
  }
  json artifacts = json::array();
  for (const auto& a : info.artifacts) {
    artifacts.push_back({{"file", a}, {"checksum", file_checksum(dir / a)}});
  }
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm);
  json doc = {{"run_id", info.run_id},         {"subcommand", info.subcommand},
              {"config_hash", info.config_hash}, {"config", info.config_text},
              {"inputs", inputs},                {"artifacts", artifacts},
              {"created", stamp}};
  write_file(dir / "manifest.json", doc.dump(2) + "\n");
}

}  // namespace amplab::harness
