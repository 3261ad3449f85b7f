#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../common/gradcheck.hpp"
#include "amplab/core/error.hpp"
#include "amplab/data/generators.hpp"
#include "amplab/data/transforms.hpp"
#include "amplab/nn/checkpoint.hpp"
#include "amplab/nn/mlp.hpp"
#include "amplab/nn/train.hpp"

using namespace amplab;
using amplab::testing::random_labels;
using amplab::testing::random_matrix;
using amplab::testing::random_net;

namespace {

nn::MlpSpec linear_spec(int in, int out) {
  return nn::MlpSpec{in, {}, out, nn::Activation::relu, false};
}

}  // namespace

TEST_CASE("init_mlp shapes, counts and determinism") {
  nn::MlpSpec spec{3, {5, 4}, 2, nn::Activation::tanh, true};
  const auto a = nn::init_mlp(spec, 42);
  const auto b = nn::init_mlp(spec, 42);
  const auto c = nn::init_mlp(spec, 43);
  REQUIRE(a.params.layers.size() == 3);
  CHECK(a.params.layers[0].weight.rows() == 5);
  CHECK(a.params.layers[0].weight.cols() == 3);
  CHECK(a.params.layers[2].weight.rows() == 2);
  CHECK(a.params.size() == nn::parameter_count(spec));
  CHECK(nn::parameter_count(spec) == 3 * 5 + 5 + 5 * 4 + 4 + 4 * 2 + 2);
  CHECK(a.params.flatten() == b.params.flatten());
  CHECK(a.params.flatten() != c.params.flatten());
  const double bound = 1.0 / std::sqrt(3.0);
  CHECK(a.params.layers[0].weight.cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("init_mlp rejects invalid specs") {
  CHECK_THROWS_AS(nn::init_mlp({3, {5, 0}, 2}, 1), InvalidSpecError);
  CHECK_THROWS_AS(nn::init_mlp({0, {5}, 2}, 1), InvalidSpecError);
  CHECK_THROWS_AS(nn::init_mlp({3, {5}, 1}, 1), InvalidSpecError);
}

TEST_CASE("spec text form round-trips") {
  for (const nn::MlpSpec& s : {nn::MlpSpec{2, {64}, 2, nn::Activation::relu, true},
                               nn::MlpSpec{784, {256, 256, 256}, 10, nn::Activation::softplus, false},
                               nn::MlpSpec{5, {}, 3, nn::Activation::tanh, true}}) {
    CHECK(nn::spec_from_string(nn::spec_to_string(s)) == s);
  }
  CHECK(nn::spec_to_string({2, {64, 8}, 2, nn::Activation::relu, true}) ==
        "in=2 hidden=64,8 out=2 act=relu bn=1");
  CHECK_THROWS_AS(nn::spec_from_string("in=2 hidden=0 out=2 act=relu bn=1"), InvalidSpecError);
  CHECK_THROWS_AS(nn::spec_from_string("in=2 out=2 act=relu bn=1"), InvalidSpecError);
  CHECK_THROWS_AS(nn::spec_from_string("in=2 hidden=4 out=2 act=gelu bn=1"), InvalidSpecError);
}

TEST_CASE("forward: zero parameters give zero logits") {
  auto mlp = nn::init_mlp({3, {4}, 3, nn::Activation::relu, false}, 1);
  mlp.params.assign(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp.params.size())));
  Rng rng(5);
  const auto z = nn::forward(mlp, random_matrix(rng, 6, 3));
  CHECK(z.rows() == 6);
  CHECK(z.cols() == 3);
  CHECK(z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward: single affine layer equals x W^T + b") {
  auto mlp = nn::init_mlp(linear_spec(2, 2), 3);
  mlp.params.layers[0].weight << 1.0, 2.0, -3.0, 0.5;
  mlp.params.layers[0].bias << 0.25, -1.0;
  RowMatrix x(2, 2);
  x << 1.0, 1.0, 2.0, -4.0;
  const auto z = nn::forward(mlp, x);
  CHECK(z(0, 0) == doctest::Approx(3.25));
  CHECK(z(0, 1) == doctest::Approx(-3.5));
  CHECK(z(1, 0) == doctest::Approx(-5.75));
  CHECK(z(1, 1) == doctest::Approx(-9.0));
}

TEST_CASE("forward: dimension mismatch is a shape error") {
  const auto mlp = nn::init_mlp({3, {4}, 2}, 1);
  CHECK_THROWS_AS(nn::forward(mlp, RowMatrix::Zero(2, 4)), ShapeError);
}

TEST_CASE("predict breaks ties toward the lowest class") {
  auto mlp = nn::init_mlp(linear_spec(1, 3), 1);
  mlp.params.assign(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp.params.size())));
  CHECK(nn::predict(mlp, RowMatrix::Ones(3, 1)) == std::vector<int>{0, 0, 0});
}

TEST_CASE("ce_loss reference values") {
  SUBCASE("uniform logits give ln K") {
    for (int k : {2, 3, 10}) {
      const Eigen::MatrixXd z = Eigen::MatrixXd::Constant(4, k, 0.7);
      const std::vector<int> y{0, 1, 1, 0};
      CHECK(nn::ce_loss(z, y) == doctest::Approx(std::log(static_cast<double>(k))));
    }
  }
  SUBCASE("huge correct margin saturates to zero") {
    Eigen::MatrixXd z(1, 2);
    z << 0.0, 1000.0;
    const std::vector<int> y{1};
    CHECK(nn::ce_loss(z, y) == doctest::Approx(0.0).epsilon(1e-12));
    const std::vector<int> wrong{0};
    CHECK(nn::ce_loss(z, wrong) == doctest::Approx(1000.0));
  }
  SUBCASE("weights form a weighted mean") {
    Eigen::MatrixXd z(2, 2);
    z << 0.0, 0.0, 0.0, std::log(3.0);
    const std::vector<int> y{0, 1};
    const std::vector<double> w{1.0, 3.0};
    const double l0 = std::log(2.0);
    const double l1 = -std::log(0.75);
    CHECK(nn::ce_loss(z, y, w) == doctest::Approx((l0 + 3.0 * l1) / 4.0));
  }
  SUBCASE("errors") {
    const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
    const std::vector<int> bad{0, 2};
    CHECK_THROWS_AS(nn::ce_loss(z, bad), LabelError);
    const std::vector<int> y{0, 1};
    const std::vector<double> neg{1.0, -1.0};
    CHECK_THROWS(nn::ce_loss(z, y, neg));
    const std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS(nn::ce_loss(z, y, zero));
  }
}

TEST_CASE("backward matches central differences for every activation") {
  Rng rng(2024);
  for (auto act : {nn::Activation::relu, nn::Activation::tanh, nn::Activation::softplus}) {
    CAPTURE(nn::to_string(act));
    for (int trial = 0; trial < 5; ++trial) {
      const auto mlp = random_net(rng, act);
      const auto x = random_matrix(rng, 7, mlp.spec.input_dim);
      const auto y = random_labels(rng, 7, mlp.spec.output_dim);
      std::vector<double> w(7);
      for (auto& v : w) v = rng.uniform(0.1, 2.0);
      CHECK(amplab::testing::backprop_error(mlp, x, y, w) < 1e-4);
      CHECK(amplab::testing::backprop_error(mlp, x, y, {}) < 1e-4);
    }
  }
}

TEST_CASE("loss_and_gradient agrees with ce_loss and backward") {
  Rng rng(7);
  const auto mlp = random_net(rng, nn::Activation::tanh);
  const auto x = random_matrix(rng, 9, mlp.spec.input_dim);
  const auto y = random_labels(rng, 9, mlp.spec.output_dim);
  nn::Parameters g;
  const double loss = nn::loss_and_gradient(mlp, x, y, {}, g);
  CHECK(loss == doctest::Approx(nn::ce_loss(nn::forward(mlp, x), y)).epsilon(1e-12));
  CHECK((g.flatten() - nn::backward(mlp, x, y).flatten()).norm() < 1e-12);
}

TEST_CASE("input_gradient oracles") {
  SUBCASE("linear scalar model has gradient w everywhere") {
    auto mlp = nn::init_mlp(linear_spec(3, 2), 9);
    Rng rng(1);
    const auto x = random_matrix(rng, 5, 3);
    const auto g = nn::input_gradient(mlp, x, nn::Scalarization::margin);
    const Eigen::RowVectorXd w = mlp.params.layers[0].weight.row(1) - mlp.params.layers[0].weight.row(0);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK((g.row(i) - w).norm() < 1e-14);
  }
  SUBCASE("zero-weight network has zero gradient") {
    auto mlp = nn::init_mlp({2, {4}, 3, nn::Activation::tanh, false}, 1);
    mlp.params.assign(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp.params.size())));
    Rng rng(2);
    CHECK(nn::input_gradient(mlp, random_matrix(rng, 4, 2)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("matches finite differences of the margin, through the input transform") {
    Rng rng(3);
    const auto mlp = random_net(rng, nn::Activation::softplus, 2);
    const auto x = random_matrix(rng, 3, mlp.spec.input_dim);
    const auto g = nn::input_gradient(mlp, x);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const auto f = [&](const Eigen::VectorXd& xi) {
        RowMatrix row = xi.transpose();
        const auto z = nn::forward(mlp, row);
        return z(0, 1) - z(0, 0);
      };
      const Eigen::VectorXd fd = amplab::testing::fd_gradient(f, x.row(i).transpose(), 1e-6);
      CHECK(amplab::testing::relative_error(g.row(i).transpose(), fd) < 1e-6);
    }
  }
}

TEST_CASE("grad_penalty_value") {
  auto mlp = nn::init_mlp(linear_spec(2, 2), 4);
  mlp.params.layers[0].weight << 0.0, 0.0, 0.6, 0.8;  // ||w1 - w0|| = 1
  Rng rng(4);
  const auto x = random_matrix(rng, 6, 2);
  CHECK(nn::grad_penalty_value(mlp, x, 10.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(nn::grad_penalty_value(mlp, x, 10.0, 0.5) == doctest::Approx(10.0 * 0.25));
  const auto net = random_net(rng, nn::Activation::tanh);
  CHECK(nn::grad_penalty_value(net, random_matrix(rng, 4, net.spec.input_dim), 0.0, 1.0) == 0.0);
}

TEST_CASE("grad_penalty_backward") {
  Rng rng(11);
  SUBCASE("lambda zero gives zero gradients") {
    const auto mlp = random_net(rng, nn::Activation::tanh);
    const auto g = nn::grad_penalty_backward(mlp, random_matrix(rng, 4, mlp.spec.input_dim), 0.0, 1.0);
    CHECK(g.flatten().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("exact mode rejects relu") {
    const auto mlp = random_net(rng, nn::Activation::relu);
    CHECK_THROWS_AS(nn::grad_penalty_backward(mlp, random_matrix(rng, 4, mlp.spec.input_dim), 10.0, 1.0),
                    UnsupportedActivationError);
    CHECK_NOTHROW(nn::grad_penalty_backward(mlp, random_matrix(rng, 4, mlp.spec.input_dim), 10.0, 1.0,
                                            nn::PenaltyMode::finite_difference));
  }
  SUBCASE("double backprop matches central differences") {
    for (auto act : {nn::Activation::tanh, nn::Activation::softplus}) {
      for (int outputs : {2, 3}) {
        const auto mlp = random_net(rng, act, outputs);
        const auto x = random_matrix(rng, 5, mlp.spec.input_dim);
        CHECK(amplab::testing::penalty_error(mlp, x, 10.0, 1.0) < 1e-3);
        CHECK(amplab::testing::penalty_error(mlp, x, 2.5, 0.3) < 1e-3);
      }
    }
  }
  SUBCASE("finite-difference mode approximates exact mode") {
    const auto mlp = random_net(rng, nn::Activation::softplus);
    const auto x = random_matrix(rng, 5, mlp.spec.input_dim);
    const auto exact = nn::grad_penalty_backward(mlp, x, 10.0, 1.0).flatten();
    const auto approx =
        nn::grad_penalty_backward(mlp, x, 10.0, 1.0, nn::PenaltyMode::finite_difference).flatten();
    CHECK(amplab::testing::relative_error(exact, approx) < 1e-4);
  }
}

TEST_CASE("sgd_step is heavy-ball momentum with additive weight decay") {
  auto mlp = nn::init_mlp(linear_spec(1, 2), 1);
  Eigen::VectorXd theta(4);
  theta << 1.0, -2.0, 0.5, 0.0;
  mlp.params.assign(theta);
  nn::Parameters v = mlp.params.zeros_like();
  nn::Parameters g = mlp.params.zeros_like();
  Eigen::VectorXd gv(4);
  gv << 0.5, 0.5, -1.0, 2.0;
  g.assign(gv);
  nn::sgd_step(mlp.params, v, g, 0.1, 0.9, 0.1);
  const Eigen::VectorXd v1 = gv + 0.1 * theta;
  CHECK((v.flatten() - v1).norm() < 1e-15);
  const Eigen::VectorXd t1 = theta - 0.1 * v1;
  CHECK((mlp.params.flatten() - t1).norm() < 1e-15);
  nn::sgd_step(mlp.params, v, g, 0.1, 0.9, 0.1);
  const Eigen::VectorXd v2 = 0.9 * v1 + gv + 0.1 * t1;
  CHECK((v.flatten() - v2).norm() < 1e-15);
  CHECK((mlp.params.flatten() - (t1 - 0.1 * v2)).norm() < 1e-15);
}

TEST_CASE("train: curve invariants and determinism") {
  data::TeaserParams p;
  p.n = 200;
  p.seed = 3;
  const auto ds = data::gen_teaser_task(p);
  const auto [train_set, test_set] = data::stratified_split(ds, 0.2, 1);
  nn::TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 32;
  cfg.eval_every = 7;
  const auto mlp = nn::init_mlp({2, {16}, 2, nn::Activation::relu, true}, 5);
  const auto a = nn::train(mlp, train_set, test_set, data::Sampler::uniform(9), cfg);
  const auto b = nn::train(mlp, train_set, test_set, data::Sampler::uniform(9), cfg);
  REQUIRE(a.curve.checkpoints.size() == b.curve.checkpoints.size());
  CHECK(a.model.params.flatten() == b.model.params.flatten());
  const std::int64_t total = 5 * 20;  // 160 rows, batch 32
  CHECK(a.curve.checkpoints.front().step == 0);
  CHECK(a.curve.final().step == total);
  for (std::size_t i = 1; i < a.curve.checkpoints.size(); ++i) {
    const auto& c = a.curve.checkpoints[i];
    CHECK(c.step > a.curve.checkpoints[i - 1].step);
    CHECK((c.step % 7 == 0 || c.step == total));
    for (const auto& [g, acc] : c.test_acc) {
      CHECK(acc >= 0.0);
      CHECK(acc <= 1.0);
    }
    CHECK(c.loss == b.curve.checkpoints[i].loss);
  }
  CHECK(a.curve.best().test_acc_overall >= a.curve.final().test_acc_overall);
  CHECK(a.curve.final().test_acc_overall > 0.75);
}

TEST_CASE("train: divergence is reported with the partial curve") {
  data::TeaserParams p;
  p.n = 200;
  const auto ds = data::gen_teaser_task(p);
  nn::TrainConfig cfg;
  cfg.learning_rate = 1e12;
  cfg.epochs = 50;
  cfg.eval_every = 1;
  const auto mlp = nn::init_mlp({2, {8}, 2, nn::Activation::relu, true}, 5);
  try {
    nn::train(mlp, ds, ds, data::Sampler::uniform(1), cfg);
    FAIL("expected divergence");
  } catch (const nn::DivergenceError& e) {
    CHECK(e.kind() == ErrorKind::numeric);
    CHECK(e.step() >= 1);
    CHECK(!e.partial_curve().checkpoints.empty());
  }
}

TEST_CASE("train rejects invalid configs") {
  nn::TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
  cfg = {};
  cfg.momentum = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameterError);
}

TEST_CASE("model files round-trip exactly") {
  Rng rng(8);
  auto mlp = random_net(rng, nn::Activation::softplus);
  std::stringstream ss;
  nn::save_mlp(mlp, ss);
  const auto back = nn::load_mlp(ss);
  CHECK(back.spec == mlp.spec);
  CHECK(back.seed == mlp.seed);
  CHECK(back.params.flatten() == mlp.params.flatten());
  CHECK(back.input.shift == mlp.input.shift);
  CHECK(back.input.scale == mlp.input.scale);
  std::stringstream bad("amplab-mlp 2\n");
  CHECK_THROWS(nn::load_mlp(bad));
}
