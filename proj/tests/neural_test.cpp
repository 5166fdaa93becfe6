//
// Project synroute - Copyright 2026 synroute authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "synroute/error.h"
#include "synroute/neural.h"
#include "gradient_oracle.h"

namespace synroute::nn {
namespace {

using testing::max_rel_err;
using testing::numeric_gradient;
using testing::random_matrix;
using testing::rel_err;

TEST(Neural, ZeroNetOutputsZero) {
  DenseNet net(NetShape {4, 3, 5, 2}.specs());
  Rng rng(1);
  Matrix x = random_matrix(4, 7, rng);
  EXPECT_TRUE(net.apply(x).isZero());
}

TEST(Neural, IdentityLayerIsAffine) {
  NetShape shape {3, 1, 1, 2, false, Activation::kGelu, Activation::kIdentity};
  Rng rng(2);
  DenseNet net(shape, rng);
  net.params().tail(2) << 0.5, -1.5;
  Eigen::Map<Matrix> w(net.params().data(), 2, 3);
  Matrix x = random_matrix(3, 4, rng);
  Matrix expect = (w * x).colwise() + Vector(net.params().tail(2));
  EXPECT_TRUE(net.apply(x).isApprox(expect, 1e-14));
}

TEST(Neural, BceGradientThroughNetwork) {
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(100 + trial);
    NetShape shape {5, 1 + trial % 4, 4 + trial % 3, 1, trial % 2 == 1};
    DenseNet net(shape, rng);
    Matrix x = random_matrix(5, 6, rng);
    Vector labels(6);
    for (int i = 0; i < 6; ++i) labels[i] = static_cast<double>(uniform_int(rng, 0, 1));
    auto loss = [&] { return bce_with_logits(net.apply(x).row(0).transpose(), labels).loss; };
    ForwardCache cache;
    Matrix out = net.forward(x, cache);
    LossGrad lg = bce_with_logits(out.row(0).transpose(), labels);
    Vector analytic = net.backward(cache, lg.grad.transpose());
    Vector numeric = numeric_gradient(net.params(), loss);
    EXPECT_LT(max_rel_err(analytic, numeric), 1e-4) << "trial " << trial;
  }
}

TEST(Neural, SigmoidOutputGradient) {
  Rng rng(5);
  NetShape shape {3, 2, 4, 2, false, Activation::kGelu, Activation::kSigmoid};
  DenseNet net(shape, rng);
  Matrix x = random_matrix(3, 3, rng);
  Matrix up = random_matrix(2, 3, rng);
  auto f = [&] { return (net.apply(x).array() * up.array()).sum(); };
  ForwardCache cache;
  net.forward(x, cache);
  EXPECT_LT(max_rel_err(net.backward(cache, up), numeric_gradient(net.params(), f)), 1e-4);
}

TEST(Neural, RankNetGradientAndTies) {
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(200 + trial);
    const int n = 2 + trial % 6;
    Vector s = random_matrix(n, 1, rng);
    Vector t(n);
    for (int i = 0; i < n; ++i) t[i] = static_cast<double>(uniform_int(rng, 0, 3));
    LossGrad lg = ranknet_loss(s, t);
    auto f = [&] { return ranknet_loss(s, t).loss; };
    EXPECT_LT(max_rel_err(lg.grad, numeric_gradient(s, f)), 1e-4);
  }
  Vector equal = Vector::Constant(4, 0.3);
  Vector targets(4);
  targets << 1, 2, 3, 4;
  EXPECT_NEAR(ranknet_loss(equal, targets).loss, std::log(2.0), 1e-12);
  Vector far(2), ord(2);
  far << 60, -60;
  ord << 1, 0;
  EXPECT_LT(ranknet_loss(far, ord).loss, 1e-40);
  // Tie labels: 1/2 gives zero gradient at equal scores, 0 pushes apart.
  Vector tied = Vector::Constant(2, 1.0);
  EXPECT_TRUE(ranknet_loss(equal.head(2), tied).grad.isZero());
  EXPECT_FALSE(ranknet_loss(equal.head(2), tied, 0.0).grad.isZero());
}

TEST(Neural, MseGradient) {
  Rng rng(8);
  Vector s = random_matrix(5, 1, rng), t = random_matrix(5, 1, rng);
  auto f = [&] { return mse_loss(s, t).loss; };
  EXPECT_LT(max_rel_err(mse_loss(s, t).grad, numeric_gradient(s, f)), 1e-4);
}

TEST(Neural, NamEndToEndGradientIncludingAlpha) {
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(300 + trial);
    const int dim = 6, nblocks = 8;
    Matrix fps = random_matrix(dim, nblocks, rng).cwiseAbs();
    NetShape shape {dim, 2 + trial % 3, 5, 1, false};
    NamModel model(DenseNet(shape, rng), standard_normal(rng));
    std::vector<NamExample> batch;
    for (int e = 0; e < 6; ++e) {
      NamExample ex;
      const int m = 1 + static_cast<int>(uniform_int(rng, 0, 3));
      for (int k = 0; k < m; ++k) ex.blocks.push_back(static_cast<int>(uniform_int(rng, 0, nblocks - 1)));
      ex.target = uniform_real(rng);
      batch.push_back(ex);
    }
    const NamLoss mode = trial % 4 == 3 ? NamLoss::kMse : NamLoss::kRankNet;
    NamBatchGrad g = nam_batch_gradient(model, fps, batch, mode, 0.5);
    auto f = [&] { return nam_batch_gradient(model, fps, batch, mode, 0.5).loss; };
    EXPECT_LT(max_rel_err(g.body_grad, numeric_gradient(model.body().params(), f)), 1e-4)
        << "trial " << trial;
    Vector a(1);
    a[0] = model.alpha_raw();
    auto fa = [&] {
      model.set_alpha_raw(a[0]);
      return nam_batch_gradient(model, fps, batch, mode, 0.5).loss;
    };
    const double num_alpha = numeric_gradient(a, fa)[0];
    model.set_alpha_raw(a[0]);
    EXPECT_LT(rel_err(g.alpha_grad, num_alpha), 1e-4) << "trial " << trial;
  }
}

TEST(Neural, NamCombineRule) {
  NamModel m(DenseNet(NetShape {1, 1, 1, 1}.specs()), 0.0);
  EXPECT_DOUBLE_EQ(m.alpha(), 0.5);
  EXPECT_DOUBLE_EQ(m.combine({1.0, 3.0}), 3.0);
  EXPECT_DOUBLE_EQ(m.combine({2.5}), 2.5);
  m.set_alpha_raw(50);
  EXPECT_NEAR(m.combine({1.0, 3.0}), 4.0, 1e-12);
  m.set_alpha_raw(-50);
  EXPECT_NEAR(m.combine({1.0, 3.0}), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.combine({1.0, 3.0, 2.0}), m.combine({3.0, 2.0, 1.0}));
  EXPECT_THROW(m.combine({}), Error);
}

TEST(Neural, AdamFirstStep) {
  Vector p = Vector::Constant(3, 1.0);
  Vector g(3);
  g << 0.5, -2.0, 1e-3;
  Adam adam(3);
  adam.step(p, g);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(p[i] - 1.0), 5e-4, 1e-8);
  Vector q = Vector::Constant(3, 2.0);
  Adam zero(3);
  zero.step(q, Vector::Zero(3));
  EXPECT_TRUE(q.isApproxToConstant(2.0));
  g[1] = std::nan("");
  EXPECT_THROW(adam.step(p, g), Error);
}

TEST(Neural, SpearmanFixtures) {
  std::vector<double> x {1, 2, 3, 4, 5};
  std::vector<double> rev {5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(spearman(x, x).value, 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, rev).value, -1.0);
  // Hand-ranked: ranks of ys are (2, 1, 4, 3, 5): d^2 sum = 4, rho = 1 - 6*4/120.
  std::vector<double> y {20, 10, 40, 30, 50};
  EXPECT_NEAR(spearman(x, y).value, 0.8, 1e-12);
  // Ties get average ranks.
  EXPECT_EQ(average_ranks({3, 1, 3, 2}), (std::vector<double> {3.5, 1, 3.5, 2}));
  auto c = spearman({1, 1, 1}, {1, 2, 3});
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(c.value, 0.0);
  EXPECT_THROW(spearman({1}, {1}), Error);
}

TEST(Neural, SerializationRoundTrip) {
  Rng rng(4);
  NetShape shape {7, 3, 5, 1, true};
  NamModel m(DenseNet(shape, rng), 0.37);
  std::stringstream ss;
  m.write(ss);
  NamModel back = NamModel::read(ss);
  EXPECT_EQ(back.alpha_raw(), 0.37);
  EXPECT_EQ(back.body().params(), m.body().params());
  EXPECT_EQ(back.body().specs().size(), 3u);
  std::stringstream broken(ss.str().substr(0, 20));
  EXPECT_THROW(NamModel::read(broken), Error);
}

// Scores are a fixed linear function of block features, so a trained NAM
// should rank held-out products well.
TEST(Neural, TrainNamRecoversAdditiveTargets) {
  Rng rng(11);
  const int dim = 16, nblocks = 60;
  Matrix fps = random_matrix(dim, nblocks, rng).cwiseAbs();
  Vector w = random_matrix(dim, 1, rng);
  Vector truth = fps.transpose() * w;
  std::vector<NamExample> examples;
  for (int e = 0; e < 600; ++e) {
    NamExample ex;
    const int m = 1 + static_cast<int>(uniform_int(rng, 0, 3));
    double sum = 0;
    for (int k = 0; k < m; ++k) {
      const int id = static_cast<int>(uniform_int(rng, 0, nblocks - 1));
      ex.blocks.push_back(id);
      sum += truth[id];
    }
    ex.target = sum / m;
    examples.push_back(ex);
  }
  NamTrainConfig cfg;
  cfg.shape.layers = 3;
  cfg.shape.width = 16;
  cfg.adam.lr = 3e-3;
  cfg.seed = 5;
  NamTrainResult r = train_nam(examples, fps, cfg);
  EXPECT_FALSE(r.skipped);
  EXPECT_GE(r.best_validation_spearman, 0.95);
  EXPECT_GE(r.best_epoch, 1);
  std::vector<double> pred(nblocks), ref(nblocks);
  const Vector s = r.model.block_scores(fps);
  for (int i = 0; i < nblocks; ++i) pred[i] = s[i], ref[i] = truth[i];
  EXPECT_GE(spearman(pred, ref).value, 0.9);

  NamTrainResult again = train_nam(examples, fps, cfg);
  EXPECT_EQ(again.model.body().params(), r.model.body().params());
  EXPECT_EQ(again.model.alpha_raw(), r.model.alpha_raw());
}

TEST(Neural, TrainNamEdgeCases) {
  Matrix fps = Matrix::Ones(3, 2);
  fps(0, 1) = 2;
  NamTrainConfig cfg;
  cfg.shape.layers = 2;
  cfg.shape.width = 4;
  std::vector<NamExample> two {{{0}, 0.1}, {{1}, 0.9}};
  EXPECT_NO_THROW(train_nam(two, fps, cfg));
  std::vector<NamExample> flat {{{0}, 0.5}, {{1}, 0.5}, {{0, 1}, 0.5}};
  NamTrainResult r = train_nam(flat, fps, cfg);
  EXPECT_TRUE(r.skipped);
  EXPECT_DOUBLE_EQ(r.model.alpha(), 0.5);
  EXPECT_THROW(train_nam({{{0}, 1.0}}, fps, cfg), Error);
}

}  // namespace
}  // namespace synroute::nn
