#include "amplab/harness/mitigation.hpp"

#include <cstdio>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"
#include "amplab/data/sampler.hpp"
#include "amplab/data/transforms.hpp"

namespace amplab::harness {

MitigationStrategy MitigationStrategy::from_config(const ExperimentConfig& config) {
  MitigationStrategy s;
  if (config.strategy == "oversample") {
    s.kind = Kind::oversample;
    s.amount = config.weight;
  } else if (config.strategy == "add_data") {
    s.kind = Kind::add_data;
    s.amount = config.factor;
  } else {
    throw ConfigError("protocol.strategy must be oversample or add_data");
  }
  s.target_group = config.target_group;
  return s;
}

std::string MitigationStrategy::name() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s(%g)", kind == Kind::oversample ? "oversample" : "add_data",
                amount);
  return buf;
}

namespace {

std::vector<double> run_disparities(const CombinedResult& c, int a, int b, CheckpointChoice which) {
  const auto& ga = c.groups[static_cast<std::size_t>(a)];
  const auto& gb = c.groups[static_cast<std::size_t>(b)];
  const auto& va = which == CheckpointChoice::final ? ga.final : ga.early_stopped;
  const auto& vb = which == CheckpointChoice::final ? gb.final : gb.early_stopped;
  std::vector<double> d;
  for (std::size_t r = 0; r < va.size(); ++r) d.push_back(va[r] - vb[r]);
  return d;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

MitigationResult mitigation_experiment(const data::GroupedDataset& ds,
                                       const std::optional<data::GroupedDataset>& reserve,
                                       const MitigationStrategy& strategy,
                                       const ExperimentConfig& config) {
  if (ds.num_groups() < 2) throw GroupError("mitigation needs at least two groups");
  if (strategy.target_group < 0 || strategy.target_group >= ds.num_groups()) {
    throw GroupError("mitigation target group " + std::to_string(strategy.target_group) +
                     " does not exist");
  }
  CombinedOptions options;
  if (strategy.kind == MitigationStrategy::Kind::oversample) {
    if (!(strategy.amount > 0.0)) throw InvalidParameterError("oversample weight must be > 0");
    options.make_sampler = [&](const data::GroupedDataset& train, std::size_t, std::uint64_t seed) {
      return data::oversample_weights(train, strategy.target_group, strategy.amount, seed);
    };
  } else {
    if (!(strategy.amount >= 1.0)) throw InvalidParameterError("add_data factor must be >= 1");
    if (!reserve) throw InvalidParameterError("add_data needs a reserve dataset");
    options.transform_train = [&](const data::GroupedDataset& train, std::size_t run) {
      return data::augment_group(train, *reserve, strategy.target_group, strategy.amount,
                                 derive_seed(config.seed, "reserve", run));
    };
  }

  const auto splits = make_splits(ds, config);
  auto single = run_single_group_protocol(ds, config, &splits);
  auto baseline = run_combined_protocol(ds, config, &splits);
  auto mitigated = run_combined_protocol(ds, config, &splits, options);

  MitigationResult out;
  out.strategy = strategy;
  for (int a = 0; a < ds.num_groups(); ++a) {
    for (int b = a + 1; b < ds.num_groups(); ++b) {
      PairDelta pd;
      pd.group_a = a;
      pd.group_b = b;
      pd.d_before = run_disparities(baseline, a, b, config.checkpoint);
      pd.d_after = run_disparities(mitigated, a, b, config.checkpoint);
      pd.mean_before = mean(pd.d_before);
      pd.mean_after = mean(pd.d_after);
      pd.delta = pd.mean_after - pd.mean_before;
      out.deltas.push_back(std::move(pd));
    }
  }
  out.before = assemble_audit(ds, single, std::move(baseline)).reports;
  out.after = assemble_audit(ds, std::move(single), std::move(mitigated)).reports;
  return out;
}

}  // namespace amplab::harness
