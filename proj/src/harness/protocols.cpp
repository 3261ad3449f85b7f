#include "amplab/harness/protocols.hpp"

#include <cmath>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"
#include "amplab/data/transforms.hpp"
#include "amplab/harness/work_queue.hpp"
#include "amplab/nn/mlp.hpp"

namespace amplab::harness {

std::vector<RunSplit> make_splits(const data::GroupedDataset& ds, const ExperimentConfig& config) {
  config.validate();
  std::vector<RunSplit> out;
  out.reserve(static_cast<std::size_t>(config.n_runs));
  for (int r = 0; r < config.n_runs; ++r) {
    const auto seed = derive_seed(config.seed, "split", static_cast<std::uint64_t>(r));
    auto [train, test] = data::stratified_split(ds, config.test_fraction, seed);
    out.push_back({std::move(train), std::move(test), seed});
  }
  return out;
}

RunSeeds run_seeds(const ExperimentConfig& config, const std::string& condition, std::size_t run) {
  return {derive_seed(config.seed, condition + "/init", run),
          derive_seed(config.seed, condition + "/batches", run)};
}

nn::TrainResult train_run(const ExperimentConfig& config, const std::string& condition,
                          std::size_t run, const data::GroupedDataset& train_set,
                          const data::GroupedDataset& test_set,
                          const std::optional<data::Sampler>& sampler) {
  const RunSeeds seeds = run_seeds(config, condition, run);
  try {
    if (config.on_train) config.on_train({condition, run, &train_set, &test_set});
    const auto spec = resolve_spec(config.model, train_set);
    nn::TrainConfig tc = config.train;
    tc.seed = seeds.batches;
    const auto mlp = nn::init_mlp(spec, seeds.init);
    return nn::train(mlp, train_set, test_set, sampler ? *sampler : data::Sampler::uniform(seeds.batches),
                     tc);
  } catch (const Error& e) {
    throw Error(e.kind(), e.tag(), condition + " run " + std::to_string(run) + ": " + e.what());
  }
}

double curve_accuracy(const nn::TrainingCurve& curve, CheckpointChoice which,
                      std::optional<int> group) {
  const nn::Checkpoint& c = which == CheckpointChoice::final ? curve.final() : curve.best();
  if (!group) return c.test_acc_overall;
  const auto it = c.test_acc.find(*group);
  if (it == c.test_acc.end()) throw GroupError("no test accuracy for group " + std::to_string(*group));
  return it->second;
}

namespace {

const std::vector<RunSplit>& ensure_splits(const data::GroupedDataset& ds,
                                           const ExperimentConfig& config,
                                           const std::vector<RunSplit>* splits,
                                           std::vector<RunSplit>& storage) {
  if (splits) {
    if (splits->size() != static_cast<std::size_t>(config.n_runs)) {
      throw InvalidParameterError("split count does not match protocol.runs");
    }
    return *splits;
  }
  storage = make_splits(ds, config);
  return storage;
}

std::string group_name(const data::GroupedDataset& ds, int g) {
  return ds.group_names()[static_cast<std::size_t>(g)];
}

}  // namespace

SingleGroupResult run_single_group_protocol(const data::GroupedDataset& ds,
                                            const ExperimentConfig& config,
                                            const std::vector<RunSplit>* splits) {
  std::vector<RunSplit> storage;
  const auto& sp = ensure_splits(ds, config, splits, storage);
  const int groups = ds.num_groups();
  const auto runs = static_cast<std::size_t>(config.n_runs);

  std::vector<nn::TrainingCurve> curves(static_cast<std::size_t>(groups) * runs);
  parallel_for(curves.size(), config.jobs, [&](std::size_t job) {
    const int g = static_cast<int>(job / runs);
    const std::size_t r = job % runs;
    const auto train = data::restrict_to_group(sp[r].train, g);
    const auto test = data::restrict_to_group(sp[r].test, g);
    curves[job] = train_run(config, "iso/g" + std::to_string(g), r, train, test).curve;
  });

  SingleGroupResult out;
  for (int g = 0; g < groups; ++g) {
    GroupRuns gr;
    gr.group = g;
    gr.name = group_name(ds, g);
    for (std::size_t r = 0; r < runs; ++r) {
      const auto& curve = curves[static_cast<std::size_t>(g) * runs + r];
      gr.early_stopped.push_back(curve_accuracy(curve, CheckpointChoice::early_stopped));
      gr.final.push_back(curve_accuracy(curve, CheckpointChoice::final));
      gr.seeds.push_back(run_seeds(config, "iso/g" + std::to_string(g), r).init);
    }
    out.groups.push_back(std::move(gr));
  }
  return out;
}

CombinedResult run_combined_protocol(const data::GroupedDataset& ds, const ExperimentConfig& config,
                                     const std::vector<RunSplit>* splits,
                                     const CombinedOptions& options) {
  std::vector<RunSplit> storage;
  const auto& sp = ensure_splits(ds, config, splits, storage);
  const auto runs = static_cast<std::size_t>(config.n_runs);

  CombinedResult out;
  out.curves.resize(runs);
  parallel_for(runs, config.jobs, [&](std::size_t r) {
    const data::GroupedDataset* train = &sp[r].train;
    data::GroupedDataset transformed;
    if (options.transform_train) {
      transformed = options.transform_train(sp[r].train, r);
      train = &transformed;
    }
    std::optional<data::Sampler> sampler;
    if (options.make_sampler) {
      sampler = options.make_sampler(*train, r, run_seeds(config, options.condition, r).batches);
    }
    out.curves[r] = train_run(config, options.condition, r, *train, sp[r].test, sampler).curve;
  });

  for (int g = 0; g < ds.num_groups(); ++g) {
    GroupRuns gr;
    gr.group = g;
    gr.name = group_name(ds, g);
    for (std::size_t r = 0; r < runs; ++r) {
      gr.early_stopped.push_back(curve_accuracy(out.curves[r], CheckpointChoice::early_stopped, g));
      gr.final.push_back(curve_accuracy(out.curves[r], CheckpointChoice::final, g));
      gr.seeds.push_back(run_seeds(config, options.condition, r).init);
    }
    out.groups.push_back(std::move(gr));
  }
  for (const auto& c : out.curves) {
    out.overall_early_stopped.push_back(curve_accuracy(c, CheckpointChoice::early_stopped));
    out.overall_final.push_back(curve_accuracy(c, CheckpointChoice::final));
  }
  return out;
}

std::vector<TrajectoryPoint> disparity_trajectory(const std::vector<nn::TrainingCurve>& curves,
                                                  int group_a, int group_b) {
  std::vector<TrajectoryPoint> out;
  if (curves.empty()) return out;
  const std::size_t points = curves.front().checkpoints.size();
  for (const auto& c : curves) {
    if (c.checkpoints.size() != points) {
      throw InvalidParameterError("trajectory: runs have different checkpoint schedules");
    }
  }
  for (std::size_t i = 0; i < points; ++i) {
    std::vector<double> d;
    for (const auto& c : curves) {
      const auto& cp = c.checkpoints[i];
      d.push_back(cp.test_acc.at(group_a) - cp.test_acc.at(group_b));
    }
    const auto s = metrics::AccuracySummary::from_runs(d);
    out.push_back({curves.front().checkpoints[i].step, s.mean, s.stderr_});
  }
  return out;
}

const metrics::DisparityReport& AuditResult::report(int a, int b) const {
  for (const auto& r : reports) {
    if (r.group_a == a && r.group_b == b) return r;
  }
  throw GroupError("no report for group pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
}

AuditResult assemble_audit(const data::GroupedDataset& ds, SingleGroupResult single,
                           CombinedResult combined) {
  using metrics::AccuracySummary;
  if (ds.num_groups() < 2) throw GroupError("audit needs at least two groups");
  AuditResult out;
  for (int a = 0; a < ds.num_groups(); ++a) {
    for (int b = a + 1; b < ds.num_groups(); ++b) {
      const auto& ia = single.groups[static_cast<std::size_t>(a)];
      const auto& ib = single.groups[static_cast<std::size_t>(b)];
      const auto& ca = combined.groups[static_cast<std::size_t>(a)];
      const auto& cb = combined.groups[static_cast<std::size_t>(b)];
      metrics::DisparityReport rep;
      rep.group_a = a;
      rep.group_b = b;
      rep.name_a = ia.name;
      rep.name_b = ib.name;
      rep.early_stopped = metrics::DisparityView::make(
          AccuracySummary::from_runs(ia.early_stopped), AccuracySummary::from_runs(ib.early_stopped),
          AccuracySummary::from_runs(ca.early_stopped), AccuracySummary::from_runs(cb.early_stopped));
      rep.final = metrics::DisparityView::make(
          AccuracySummary::from_runs(ia.final), AccuracySummary::from_runs(ib.final),
          AccuracySummary::from_runs(ca.final), AccuracySummary::from_runs(cb.final));
      out.reports.push_back(std::move(rep));
      out.trajectories.push_back(disparity_trajectory(combined.curves, a, b));
    }
  }
  out.single = std::move(single);
  out.combined = std::move(combined);
  return out;
}

AuditResult audit(const data::GroupedDataset& ds, const ExperimentConfig& config) {
  if (ds.num_groups() < 2) throw GroupError("audit needs at least two groups");
  const auto splits = make_splits(ds, config);
  auto single = run_single_group_protocol(ds, config, &splits);
  auto combined = run_combined_protocol(ds, config, &splits);
  return assemble_audit(ds, std::move(single), std::move(combined));
}

}  // namespace amplab::harness
