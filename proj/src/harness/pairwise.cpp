#include "amplab/harness/pairwise.hpp"

#include "amplab/core/error.hpp"
#include "amplab/harness/protocols.hpp"
#include "amplab/harness/work_queue.hpp"
#include "amplab/metrics/accuracy.hpp"
#include "amplab/metrics/ranking.hpp"

namespace amplab::harness {

PairwiseAnalysis pairwise_analysis(const std::vector<Eigen::MatrixXd>& matrices,
                                   const std::vector<double>& distances) {
  if (matrices.size() < 2) throw InvalidParameterError("pairwise analysis needs at least two models");
  const auto m = matrices.front().rows();
  if (m < 3) throw ClassError("pairwise analysis needs at least three classes");
  PairwiseAnalysis out;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) out.pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  if (distances.size() != out.pairs.size()) {
    throw ShapeError("pairwise analysis: " + std::to_string(distances.size()) + " distances for " +
                     std::to_string(out.pairs.size()) + " pairs");
  }
  for (const auto& mat : matrices) {
    if (mat.rows() != m || mat.cols() != m) throw ShapeError("pairwise analysis: matrix sizes differ");
    std::vector<double> acc;
    for (const auto& [i, j] : out.pairs) acc.push_back(mat(i, j));
    out.accuracy_ranks.push_back(metrics::rank_transform(acc));
    out.accuracies.push_back(std::move(acc));
  }
  const auto models = static_cast<Eigen::Index>(matrices.size());
  out.tau = Eigen::MatrixXd::Identity(models, models);
  for (Eigen::Index a = 0; a < models; ++a) {
    for (Eigen::Index b = a + 1; b < models; ++b) {
      const double t = metrics::kendall_tau(out.accuracies[static_cast<std::size_t>(a)],
                                            out.accuracies[static_cast<std::size_t>(b)]);
      out.tau(a, b) = out.tau(b, a) = t;
    }
  }
  out.distances = distances;
  out.distance_ranks = metrics::rank_transform(distances);

  const auto d = static_cast<Eigen::Index>(out.pairs.size());
  Eigen::MatrixXd x(d, models);
  for (Eigen::Index k = 0; k < models; ++k) {
    for (Eigen::Index p = 0; p < d; ++p) {
      x(p, k) = out.accuracy_ranks[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
    }
  }
  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(out.distance_ranks.data(), d);
  out.pls = stats::pls1_fit(x, y);
  out.r_squared = out.pls.r_squared;
  return out;
}

std::vector<nn::MlpSpec> pairwise_specs(const ExperimentConfig& config) {
  std::vector<nn::MlpSpec> specs;
  for (const auto& widths : config.pairwise_models) {
    nn::MlpSpec s = config.model;
    s.hidden_widths = widths;
    specs.push_back(s);
  }
  return specs;
}

PairwiseResult pairwise_difficulty_experiment(const data::GroupedDataset& ds,
                                              const std::vector<nn::MlpSpec>& specs,
                                              const ExperimentConfig& config) {
  if (ds.num_classes() < 3) {
    throw ClassError("pairwise experiment needs at least three classes, task has " +
                     std::to_string(ds.num_classes()) +
                     "; use a multi-class task (task.kind = blobs, csv or idx)");
  }
  if (specs.size() < 2) throw InvalidParameterError("pairwise experiment needs at least two model specs");
  const auto splits = make_splits(ds, config);
  const auto runs = splits.size();
  const int m = ds.num_classes();

  PairwiseResult out;
  out.class_names = ds.class_names();
  std::vector<Eigen::MatrixXd> per_run(specs.size() * runs);
  for (const auto& spec : specs) out.specs.push_back(resolve_spec(spec, ds));

  parallel_for(per_run.size(), config.jobs, [&](std::size_t job) {
    const std::size_t s = job / runs;
    const std::size_t r = job % runs;
    ExperimentConfig cfg = config;
    cfg.model = out.specs[s];
    const auto result = train_run(cfg, "pairwise/" + nn::spec_to_string(out.specs[s]), r,
                                  splits[r].train, splits[r].test);
    per_run[job] = metrics::pairwise_difficulty_matrix(result.model, splits[r].test);
  });
  for (std::size_t s = 0; s < specs.size(); ++s) {
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t r = 0; r < runs; ++r) mean += per_run[s * runs + r];
    out.matrices.push_back(mean / static_cast<double>(runs));
  }
  std::vector<double> distances;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) distances.push_back(metrics::cosine_distance_class_means(ds, i, j));
  }
  out.analysis = pairwise_analysis(out.matrices, distances);
  return out;
}

}  // namespace amplab::harness
