#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"
#include "amplab/data/generators.hpp"
#include "amplab/metrics/accuracy.hpp"
#include "amplab/metrics/disparity.hpp"
#include "amplab/metrics/ranking.hpp"
#include "amplab/nn/mlp.hpp"
#include "../common/oracles.hpp"

using namespace amplab;
using namespace amplab::metrics;
using doctest::Approx;

namespace {

data::GroupedDataset labelled(std::vector<int> labels, std::vector<int> groups = {}) {
  if (groups.empty()) groups.assign(labels.size(), 0);
  RowMatrix x = RowMatrix::Zero(static_cast<Eigen::Index>(labels.size()), 1);
  return data::GroupedDataset(x, std::move(labels), std::move(groups));
}

// One-hot logits that predict `pred`.
Eigen::MatrixXd one_hot(const std::vector<int>& pred, int classes) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pred.size()), classes);
  for (std::size_t i = 0; i < pred.size(); ++i) z(static_cast<Eigen::Index>(i), pred[i]) = 1.0;
  return z;
}

AccuracySummary runs(std::vector<double> v) { return AccuracySummary::from_runs(std::move(v)); }

}  // namespace

TEST_CASE("group_accuracy") {
  const auto ds = labelled({0, 1, 1, 0, 1}, {0, 0, 1, 1, 1});
  CHECK(group_accuracy(one_hot({0, 1, 1, 0, 1}, 2), ds) == 1.0);
  CHECK(group_accuracy(one_hot({0, 0, 1, 1, 1}, 2), ds) == Approx(0.6));
  CHECK(group_accuracy(one_hot({0, 0, 1, 1, 1}, 2), ds, 1) == Approx(2.0 / 3.0));
  CHECK_THROWS_AS(group_accuracy(one_hot({0, 0, 1, 1, 1}, 2), ds, 2), EmptyDataError);
  // Equal logits predict class 0.
  CHECK(group_accuracy(Eigen::MatrixXd::Zero(5, 2), ds) == Approx(0.4));

  SUBCASE("constant model on balanced binary data") {
    nn::MlpSpec spec{.input_dim = 1, .hidden_widths = {}, .output_dim = 2, .input_batchnorm = false};
    auto mlp = nn::init_mlp(spec, 1);
    mlp.params.layers[0].weight.setZero();
    mlp.params.layers[0].bias << 1.0, 0.0;
    CHECK(group_accuracy(mlp, labelled({0, 1, 0, 1})) == 0.5);
  }
}

TEST_CASE("disparities and ratio") {
  CHECK(estimated_disparity(0.9, 0.8) == Approx(0.1));
  CHECK(estimated_disparity(0.7, 0.7) == 0.0);
  CHECK(estimated_disparity(0.8, 0.9) == -estimated_disparity(0.9, 0.8));
  CHECK(observed_disparity(0.92, 0.80) == Approx(0.12));
  CHECK(observed_disparity(0.5, 0.5) == 0.0);
  CHECK(observed_disparity(0.80, 0.92) == -observed_disparity(0.92, 0.80));
  CHECK(*amplification_ratio(0.06, 0.05) == Approx(1.2));
  CHECK(*amplification_ratio(0.05, 0.05) == 1.0);
  CHECK_FALSE(amplification_ratio(0.05, 0.0).has_value());
  CHECK_FALSE(amplification_ratio(0.05, 0.004).has_value());
}

TEST_CASE("AccuracySummary") {
  const auto s = runs({0.8, 0.9, 1.0});
  CHECK(s.mean == Approx(0.9));
  CHECK(*s.stderr_ == Approx(0.1 / std::sqrt(3.0)));
  CHECK_FALSE(runs({0.5}).stderr_.has_value());
}

TEST_CASE("DisparityView swap symmetry") {
  const auto v = DisparityView::make(runs({0.95, 0.97}), runs({0.85, 0.88}), runs({0.96, 0.98}),
                                     runs({0.80, 0.82}));
  CHECK(v.d_tilde == Approx(0.095));
  CHECK(v.d == Approx(0.16));
  const auto s = v.swapped();
  CHECK(s.d_tilde == Approx(-v.d_tilde));
  CHECK(s.d == Approx(-v.d));
  CHECK(*s.k_ratio == Approx(*v.k_ratio));
  CHECK(s.amplified == v.amplified);
  CHECK(v.amplified);
  CHECK(v.pooled_stderr.has_value());

  DisparityReport r;
  r.name_a = "a";
  r.name_b = "b";
  r.early_stopped = v;
  r.final = v;
  const auto rs = r.swapped();
  CHECK(rs.group_a == 1);
  CHECK(rs.name_a == "b");
  CHECK(rs.final.d == Approx(-v.d));
}

TEST_CASE("masked_pair_accuracy") {
  SUBCASE("perfect model") {
    const std::vector<int> y{0, 1, 2, 0, 1, 2};
    const auto z = one_hot(y, 3);
    const auto m = pairwise_difficulty_matrix(z, y, 3);
    CHECK(m.isApprox(Eigen::MatrixXd::Ones(3, 3)));
  }
  SUBCASE("constant logits give 0.5 on balanced pairs") {
    const std::vector<int> y{0, 1, 0, 1};
    CHECK(masked_pair_accuracy(Eigen::MatrixXd::Zero(4, 3), y, 0, 1) == 0.5);
    CHECK(masked_pair_accuracy(Eigen::MatrixXd::Zero(4, 3), y, 1, 0) == 0.5);
  }
  SUBCASE("masking beats full argmax on a hand case") {
    // Class 2 wins the full argmax on both rows, but 0 vs 1 is ordered correctly.
    Eigen::MatrixXd z(2, 3);
    z << 1.0, 0.0, 5.0,
         0.0, 1.0, 5.0;
    const std::vector<int> y{0, 1};
    CHECK(masked_pair_accuracy(z, y, 0, 1) == 1.0);
    CHECK(group_accuracy(z, labelled({0, 1})) == 0.0);
  }
  SUBCASE("two classes reduce to plain accuracy and the matrix is symmetric") {
    Rng rng(5);
    std::vector<int> y(40);
    Eigen::MatrixXd z(40, 2);
    for (int i = 0; i < 40; ++i) {
      y[i] = i % 2;
      z(i, 0) = rng.normal();
      z(i, 1) = rng.normal();
    }
    const auto m = pairwise_difficulty_matrix(z, y, 2);
    CHECK(m(0, 1) == m(1, 0));
    CHECK(m(0, 1) == Approx(group_accuracy(z, labelled(y))));
  }
  SUBCASE("property: masked >= full argmax on random tables") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      const int k = 3 + static_cast<int>(rng.index(4));
      const int n = 30;
      std::vector<int> y(n);
      Eigen::MatrixXd z(n, k);
      for (int i = 0; i < n; ++i) {
        y[i] = i % k;
        for (int c = 0; c < k; ++c) z(i, c) = std::round(3 * rng.normal());
      }
      const int ci = 0, cj = 1;
      std::vector<int> yy;
      std::vector<Eigen::Index> rows;
      for (int i = 0; i < n; ++i) {
        if (y[i] == ci || y[i] == cj) {
          rows.push_back(i);
          yy.push_back(y[i]);
        }
      }
      Eigen::MatrixXd zz(static_cast<Eigen::Index>(rows.size()), k);
      for (std::size_t r = 0; r < rows.size(); ++r) zz.row(static_cast<Eigen::Index>(r)) = z.row(rows[r]);
      CHECK(masked_pair_accuracy(z, y, ci, cj) >= group_accuracy(zz, labelled(yy)));
    }
  }
  SUBCASE("missing class") {
    const std::vector<int> y{0, 0, 1};
    CHECK_THROWS_AS(masked_pair_accuracy(Eigen::MatrixXd::Zero(3, 3), y, 0, 2), ClassError);
  }
}

TEST_CASE("kendall_tau") {
  const std::vector<double> a{1, 2, 3, 4};
  CHECK(kendall_tau(a, a) == 1.0);
  CHECK(kendall_tau(a, std::vector<double>{4, 3, 2, 1}) == -1.0);
  CHECK(kendall_tau(a, std::vector<double>{1, 3, 2, 4}) == Approx(4.0 / 6.0));
  CHECK_THROWS_AS(kendall_tau(a, std::vector<double>{1, 2}), ShapeError);

  SUBCASE("matches brute force, symmetric, monotone invariant") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + rng.index(20);
      std::vector<double> x(n), y(n), ex(n);
      for (std::size_t i = 0; i < n; ++i) {
        // Small integer ranges force ties.
        x[i] = static_cast<double>(rng.index(6));
        y[i] = static_cast<double>(rng.index(6));
        ex[i] = std::exp(x[i]) - 7.0;
      }
      const double t = kendall_tau(x, y);
      CHECK(t == Approx(testing::brute_tau(x, y)).epsilon(1e-12));
      CHECK(kendall_tau(y, x) == Approx(t).epsilon(1e-12));
      CHECK(kendall_tau(ex, y) == Approx(t).epsilon(1e-12));
    }
  }
}

TEST_CASE("rank_transform") {
  CHECK(rank_transform(std::vector<double>{1, 5, 9}) == std::vector<double>{1, 2, 3});
  CHECK(rank_transform(std::vector<double>{7, 7, 7, 7}) == std::vector<double>(4, 2.5));
  CHECK(rank_transform(std::vector<double>{10, 20, 20, 30}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(rank_transform(std::vector<double>{3, 1, 2}) == std::vector<double>{3, 1, 2});
}

TEST_CASE("cosine_distance_class_means") {
  auto two_means = [](double x0, double y0, double x1, double y1) {
    RowMatrix x(2, 2);
    x << x0, y0, x1, y1;
    return data::GroupedDataset(x, {0, 1}, {0, 0});
  };
  CHECK(cosine_distance_class_means(two_means(1, 2, 1, 2), 0, 1) == Approx(0.0));
  CHECK(cosine_distance_class_means(two_means(1, 0, 0, 3), 0, 1) == Approx(1.0));
  CHECK(cosine_distance_class_means(two_means(1, 0, 1, 1), 0, 1) ==
        Approx(1.0 - 1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(cosine_distance_class_means(two_means(0, 0, 1, 1), 0, 1), DegenerateError);

  const auto ds = data::gen_class_blobs(3, 4, 10, 2.0, 0.5, 8);
  const double d = cosine_distance_class_means(ds, 0, 2);
  const data::GroupedDataset scaled(ds.features() * 3.7, ds.labels(), ds.groups());
  CHECK(cosine_distance_class_means(scaled, 0, 2) == Approx(d).epsilon(1e-12));
}

TEST_CASE("separability_cells") {
  CellMeasurements cells;
  cells.a0_a1 = runs({1.0, 1.0});
  cells.b0_b1 = runs({1.0, 1.0});
  cells.a0_b1 = runs({1.0, 1.0});
  SUBCASE("missing cell") {
    try {
      separability_cells(cells);
      FAIL("expected IncompleteProtocolError");
    } catch (const IncompleteProtocolError& e) {
      CHECK(std::string(e.what()).find("s_a1_b0") != std::string::npos);
    }
  }
  SUBCASE("assembled in column order") {
    cells.a1_b0 = runs({0.5, 0.7});
    cells.a0_b1 = runs({0.9});
    const auto v = separability_cells(cells);
    CHECK(v.values()[0] == 1.0);
    CHECK(v.values()[2] == 0.9);
    CHECK(v.values()[3] == Approx(0.6));
    CHECK(v.run_counts == std::array<std::size_t, 4>{2, 2, 1, 2});
    CHECK(std::string(SeparabilityVector::kColumns[3]) == "s_a1_b0");
  }
}
