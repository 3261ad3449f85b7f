#include "amplab/harness/amplification.hpp"

#include <algorithm>
#include <cmath>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"
#include "amplab/harness/work_queue.hpp"

namespace amplab::harness {

TaskSampler teaser_task_sampler(data::TeaserParams base, std::vector<double> grid) {
  if (grid.empty()) throw InvalidParameterError("task sampler needs a nonempty frequency grid");
  return [base, grid](std::size_t, std::uint64_t seed) {
    Rng rng(seed);
    data::TeaserParams p = base;
    p.frequency = grid[rng.index(grid.size())];
    p.seed = derive_seed(seed, "teaser");
    return SampledTask{data::gen_teaser_task(p), p.frequency, seed};
  };
}

namespace {

struct CellSpec {
  const char* name;
  int g0, y0, g1, y1;
};

// Same order as SeparabilityVector::kColumns.
constexpr CellSpec kCells[4] = {
    {"a0_a1", 0, 0, 0, 1}, {"b0_b1", 1, 0, 1, 1}, {"a0_b1", 0, 0, 1, 1}, {"a1_b0", 0, 1, 1, 0}};

data::GroupedDataset cell_pair(const data::GroupedDataset& ds, const CellSpec& c) {
  auto rows0 = ds.rows_of_cell(c.g0, c.y0);
  auto rows1 = ds.rows_of_cell(c.g1, c.y1);
  if (rows0.empty() || rows1.empty()) {
    throw EmptyDataError(std::string("separability cell ") + c.name + " has an empty side");
  }
  std::vector<std::size_t> rows = rows0;
  rows.insert(rows.end(), rows1.begin(), rows1.end());
  const auto sub = ds.subset(rows);
  std::vector<int> labels(rows.size(), 0);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(rows0.size()), labels.end(), 1);
  return data::GroupedDataset(sub.features(), std::move(labels), std::vector<int>(rows.size(), 0),
                              {"first", "second"}, {std::string("cell_") + c.name});
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace

metrics::SeparabilityVector measure_cells(const data::GroupedDataset& ds,
                                          const ExperimentConfig& config,
                                          const std::vector<RunSplit>& splits) {
  if (ds.num_groups() < 2 || ds.num_classes() != 2) {
    throw GroupError("separability cells need a binary task with two groups");
  }
  const auto runs = splits.size();
  std::vector<double> acc(4 * runs);
  parallel_for(acc.size(), config.jobs, [&](std::size_t job) {
    const auto& cell = kCells[job / runs];
    const std::size_t r = job % runs;
    const auto train = cell_pair(splits[r].train, cell);
    const auto test = cell_pair(splits[r].test, cell);
    const auto result = train_run(config, std::string("cell/") + cell.name, r, train, test);
    acc[job] = curve_accuracy(result.curve, config.checkpoint);
  });
  metrics::CellMeasurements m;
  std::optional<metrics::AccuracySummary>* slots[4] = {&m.a0_a1, &m.b0_b1, &m.a0_b1, &m.a1_b0};
  for (std::size_t c = 0; c < 4; ++c) {
    *slots[c] = metrics::AccuracySummary::from_runs(
        std::vector<double>(acc.begin() + static_cast<std::ptrdiff_t>(c * runs),
                            acc.begin() + static_cast<std::ptrdiff_t>((c + 1) * runs)));
    for (std::size_t r = 0; r < runs; ++r) {
      m.seeds.push_back(run_seeds(config, std::string("cell/") + kCells[c].name, r).init);
    }
  }
  return metrics::separability_cells(m);
}

TaskRecord measure_task(const data::GroupedDataset& ds, const ExperimentConfig& config,
                        std::size_t task_id, double knob) {
  const auto splits = make_splits(ds, config);
  auto single = run_single_group_protocol(ds, config, &splits);
  auto combined = run_combined_protocol(ds, config, &splits);
  const auto audited = assemble_audit(ds, std::move(single), std::move(combined));
  const auto& rep = audited.reports.front();
  const auto& view = config.checkpoint == CheckpointChoice::final ? rep.final : rep.early_stopped;

  TaskRecord rec;
  rec.task_id = task_id;
  rec.knob = knob;
  rec.d_tilde = view.d_tilde;
  rec.d = view.d;
  rec.cells = measure_cells(ds, config, splits);
  rec.seeds = {config.seed};
  rec.d_trajectory = audited.trajectories.front();
  return rec;
}

stats::DesignMatrix amplification_design(const std::vector<TaskRecord>& records) {
  stats::DesignMatrix x;
  std::vector<double> dt;
  std::array<std::vector<double>, 4> cells;
  for (const auto& r : records) {
    dt.push_back(r.d_tilde);
    const auto v = r.cells.values();
    for (std::size_t c = 0; c < 4; ++c) cells[c].push_back(v[c]);
  }
  x.add_column("d_tilde", std::move(dt));
  for (std::size_t c = 0; c < 4; ++c) {
    x.add_column(metrics::SeparabilityVector::kColumns[c], std::move(cells[c]));
  }
  return x;
}

namespace {

// Refits after removing dependent nuisance columns until the design has full rank.
stats::RegressionResult fit_dropping(const stats::DesignMatrix& full, const std::vector<double>& y,
                                     bool intercept, std::vector<std::string>& dropped) {
  stats::DesignMatrix x = full;
  for (;;) {
    try {
      return stats::ols_fit(x, y, intercept);
    } catch (const SingularDesignError& e) {
      const auto& dep = e.dependent_columns();
      if (std::find(dep.begin(), dep.end(), "d_tilde") != dep.end()) {
        throw SingularDesignError(
            "amplification fit: d_tilde is collinear with the other regressors; widen task "
            "sampling (e.g. a broader protocol.frequencies grid or more tasks)",
            dep);
      }
      stats::DesignMatrix next;
      for (const auto& name : x.names()) {
        if (std::find(dep.begin(), dep.end(), name) == dep.end()) {
          next.add_column(name, x.column(name));
        } else {
          dropped.push_back(name);
        }
      }
      x = std::move(next);
    }
  }
}

}  // namespace

AmplificationFit fit_amplification(const std::vector<TaskRecord>& records,
                                   const std::vector<double>& response) {
  if (records.size() <= 6) {
    throw DegreesOfFreedomError("amplification fit needs more than 6 tasks, got " +
                                std::to_string(records.size()));
  }
  if (response.size() != records.size()) throw ShapeError("amplification fit: response length mismatch");
  const auto x = amplification_design(records);
  if (!(spread(x.column("d_tilde")) > 1e-12)) {
    throw SingularDesignError(
        "amplification fit: d_tilde is constant across tasks; widen task sampling (e.g. a "
        "broader protocol.frequencies grid)",
        {"d_tilde"});
  }
  AmplificationFit fit;
  fit.no_intercept = fit_dropping(x, response, false, fit.dropped_no_intercept);
  fit.with_intercept = fit_dropping(x, response, true, fit.dropped_with_intercept);
  stats::DesignMatrix only;
  only.add_column("d_tilde", x.column("d_tilde"));
  fit.d_tilde_only = stats::ols_fit(only, response, false);
  fit.k = fit.no_intercept.coefficient("d_tilde");
  fit.k_stderr = fit.no_intercept.standard_error("d_tilde");
  fit.r_squared = fit.no_intercept.r_squared;
  return fit;
}

AmplificationFit fit_amplification(const std::vector<TaskRecord>& records) {
  std::vector<double> d;
  for (const auto& r : records) d.push_back(r.d);
  return fit_amplification(records, d);
}

AmplificationReport amplification_sweep(const TaskSampler& sampler, std::size_t m_tasks,
                                        const ExperimentConfig& config) {
  if (m_tasks <= 6) {
    throw InvalidParameterError("amplification sweep needs more than 6 tasks, got " +
                                std::to_string(m_tasks));
  }
  config.validate();
  AmplificationReport report;
  for (std::size_t i = 0; i < m_tasks; ++i) {
    const auto task_seed = derive_seed(config.seed, "task", i);
    SampledTask task = sampler(i, task_seed);
    ExperimentConfig tc = config;
    tc.seed = derive_seed(config.seed, "task-protocol", i);
    try {
      TaskRecord rec = measure_task(task.ds, tc, i, task.knob);
      rec.seeds = {task_seed, tc.seed};
      report.records.push_back(std::move(rec));
    } catch (const Error& e) {
      throw Error(e.kind(), e.tag(), "task " + std::to_string(i) + ": " + e.what());
    }
  }
  report.fit = fit_amplification(report.records);
  return report;
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& variable,
                                   double value) {
  ExperimentConfig c = base;
  if (variable == "width") {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw InvalidParameterError("width sweep values must be positive integers");
    }
    for (auto& w : c.model.hidden_widths) w = static_cast<int>(value);
  } else if (variable == "weight_decay") {
    c.train.weight_decay = value;
  } else if (variable == "grad_penalty_c") {
    nn::GradPenalty gp = base.train.grad_penalty.value_or(nn::GradPenalty{});
    gp.c = value;
    c.train.grad_penalty = gp;
  } else {
    throw InvalidParameterError("unknown sweep variable '" + variable + "'");
  }
  c.validate();
  return c;
}

SweepResult design_sweep(const std::string& variable, const std::vector<double>& grid,
                         const TaskSampler& sampler, std::size_t m_tasks,
                         const ExperimentConfig& config) {
  if (std::find(kSweepVariables.begin(), kSweepVariables.end(), variable) == kSweepVariables.end()) {
    throw InvalidParameterError("sweep variable must be width, step, weight_decay or grad_penalty_c");
  }
  SweepResult out;
  out.variable = variable;
  auto point_from = [](double value, const AmplificationFit& f) {
    return SweepPoint{value,
                      f.k,
                      f.k_stderr,
                      f.r_squared,
                      f.with_intercept.coefficient("d_tilde"),
                      f.with_intercept.standard_error("d_tilde")};
  };

  if (variable == "step") {
    auto report = amplification_sweep(sampler, m_tasks, config);
    const auto& first = report.records.front().d_trajectory;
    for (std::size_t i = 0; i < first.size(); ++i) {
      const auto step = first[i].step;
      std::vector<double> d;
      for (const auto& r : report.records) {
        if (r.d_trajectory.size() <= i || r.d_trajectory[i].step != step) {
          throw InvalidParameterError("step sweep: tasks have different checkpoint schedules");
        }
        d.push_back(r.d_trajectory[i].d_mean);
      }
      try {
        out.points.push_back(point_from(static_cast<double>(step), fit_amplification(report.records, d)));
      } catch (const Error& e) {
        throw Error(e.kind(), e.tag(), "step " + std::to_string(step) + ": " + e.what());
      }
      out.grid.push_back(static_cast<double>(step));
    }
    out.reports.push_back(std::move(report));
    return out;
  }

  if (grid.empty()) throw InvalidParameterError("sweep grid must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidParameterError("sweep grid must be strictly increasing");
  }
  out.grid = grid;
  for (double value : grid) {
    try {
      const auto cfg = apply_sweep_value(config, variable, value);
      auto report = amplification_sweep(sampler, m_tasks, cfg);
      out.points.push_back(point_from(value, report.fit));
      out.reports.push_back(std::move(report));
    } catch (const Error& e) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%g", value);
      throw Error(e.kind(), e.tag(), variable + "=" + buf + ": " + e.what());
    }
  }
  return out;
}

}  // namespace amplab::harness
