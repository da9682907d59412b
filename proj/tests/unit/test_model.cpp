/**
 * Copyright 2026 The lcgnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "lcgnn/checkpoint.hpp"
#include "lcgnn/model.hpp"

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <unistd.h>

namespace lcgnn {
namespace {

using testing::Dense;
using testing::random_fixture;
using testing::random_matrix;
using testing::randomize_thresholds;
using testing::small_config;

void expect_close(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol);
}

TEST(Layer, MatchesOracleAcrossModes) {
  std::mt19937_64 rng(1);
  int instances = 0;
  for (int trial = 0; trial < 40; ++trial) {
    for (SimilarityMode sim : {SimilarityMode::Cosine, SimilarityMode::L1}) {
      for (NormMode norm : {NormMode::None, NormMode::NodeWise, NormMode::BatchWise}) {
        auto f = random_fixture(rng, 10, 3, 2, 12);
        Model model(small_config(f.g, sim, norm), trial + 1);
        randomize_thresholds(model, rng);
        const bool training = norm == NormMode::BatchWise && trial % 2 == 0;
        std::vector<NodeId> batch{0, 2, 3, 5, 7, 8};
        std::vector<std::uint8_t> flags(10, 0), labeled(10, 1);
        for (NodeId u : batch) flags[u] = 1;
        ForwardContext ctx;
        ctx.training = training;
        std::mt19937_64 pair_rng(5);
        if (training) {
          ctx.batch = batch;
          ctx.labeled = labeled;
          ctx.rng = &pair_rng;
        }
        Tape tape;
        Tensor h = model.input_projection(tape, f.g.features());
        for (std::size_t l = 1; l <= 6; ++l) {
          const RunningStats before = model.layers()[l - 1].running;
          const auto want = testing::layer_oracle(model, l, h.value(), f.adjacency,
                                                  training ? flags : std::vector<std::uint8_t>{},
                                                  training ? nullptr : &before);
          const LayerOutput got = model.layer_forward(tape, l, h, f.g, ctx);
          for (std::size_t r = 0; r < 2; ++r) {
            for (NodeId u = 0; u < 10; ++u) {
              EXPECT_EQ(got.selection.by_relation[r][u].kept, want.kept[r][u]);
            }
          }
          expect_close(got.embeddings.value(), want.embeddings, 1e-12);
          expect_close(got.logits.value(), want.logits, 1e-12);
          h = got.embeddings;
          ++instances;
        }
      }
    }
  }
  EXPECT_GE(instances, 200);
}

TEST(Layer, IisWidensCandidatesFromConfiguredLayer) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_fixture(rng, 14, 3, 2, 12);
    Model model(small_config(f.g, SimilarityMode::Cosine, NormMode::None), 3);
    Tape tape;
    ForwardContext ctx;
    const ForwardResult fwd = model.forward(tape, f.g, ctx);
    for (std::size_t l = 1; l <= 6; ++l) {
      for (std::size_t r = 0; r < 2; ++r) {
        for (NodeId u = 0; u < 14; ++u) {
          const auto& s = fwd.layers[l - 1].selection.by_relation[r][u];
          const auto want = l < 4 ? testing::dense_row(f.adjacency[r], u)
                                  : testing::bfs_depth2(f.adjacency[r], u);
          auto cands = s.candidates;
          std::sort(cands.begin(), cands.end());
          EXPECT_EQ(cands, want);
        }
      }
    }
  }
}

TEST(Layer, IisStartPastLastLayerDisablesIt) {
  std::mt19937_64 rng(3);
  auto f = random_fixture(rng, 12, 3, 1, 10);
  auto cfg = small_config(f.g, SimilarityMode::Cosine, NormMode::None);
  cfg.iis_start_layer = 7;
  Model model(cfg, 1);
  Tape tape;
  const ForwardResult fwd = model.forward(tape, f.g, ForwardContext{});
  for (const auto& layer : fwd.layers) EXPECT_EQ(layer.selection.scope, CandidateScope::OneHop);
  cfg.iis_start_layer = 8;
  EXPECT_THROW(Model(cfg, 1), std::invalid_argument);
}

TEST(Layer, IsolatedNodeKeepsEmbedding) {
  std::mt19937_64 rng(4);
  MultiRelationGraph g(random_matrix(4, 3, rng), {0, 1, 0, 1}, {{{0, 1}, {1, 2}}});
  for (NormMode norm : {NormMode::None, NormMode::NodeWise, NormMode::BatchWise}) {
    Model model(small_config(g, SimilarityMode::Cosine, norm), 2);
    Tape tape;
    Tensor h = model.input_projection(tape, g.features());
    const LayerOutput out = model.layer_forward(tape, 1, h, g, ForwardContext{});
    EXPECT_EQ(out.embeddings.value().row(3), h.value().row(3));
    EXPECT_EQ(out.selection.n_selected[3], 0.0);
  }
}

TEST(Layer, ZeroUpdateIsResidualIdentity) {
  std::mt19937_64 rng(5);
  auto f = random_fixture(rng, 10, 3, 2, 15);
  Model model(small_config(f.g, SimilarityMode::Cosine, NormMode::None), 4);
  model.layers()[0].update_weight.value.setZero();
  Tape tape;
  Tensor h = model.input_projection(tape, f.g.features());
  EXPECT_EQ(model.layer_forward(tape, 1, h, f.g, ForwardContext{}).embeddings.value(), h.value());
}

TEST(Layer, FullThresholdIsGraphSageMean) {
  std::mt19937_64 rng(6);
  auto f = random_fixture(rng, 12, 3, 1, 20);
  Model model(small_config(f.g, SimilarityMode::Cosine, NormMode::None), 5);
  model.set_thresholds(std::vector<std::vector<double>>(6, std::vector<double>{1.0}));
  Tape tape;
  Tensor h = model.input_projection(tape, f.g.features());
  const Matrix got = model.layer_forward(tape, 1, h, f.g, ForwardContext{}).embeddings.value();
  const Matrix& H = h.value();
  const auto& lp = model.layers()[0];
  for (NodeId u = 0; u < 12; ++u) {
    const auto nb = f.g.neighbors(u, 0);
    if (nb.empty()) {
      EXPECT_EQ(got.row(u), H.row(u));
      continue;
    }
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(H.cols());
    for (NodeId v : nb) mean += H.row(v);
    mean /= static_cast<double>(nb.size());
    Eigen::RowVectorXd cat(2 * H.cols());
    cat << H.row(u), mean;
    const Eigen::RowVectorXd upd = (cat * lp.update_weight.value + lp.update_bias.value).cwiseMax(0.0);
    EXPECT_LT((got.row(u) - (H.row(u) + upd)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Layer, PermutationEquivariant) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 12;
    std::vector<std::vector<Edge>> rel{testing::random_edges(n, 18, rng), testing::random_edges(n, 10, rng)};
    const Matrix x = random_matrix(n, 3, rng);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t u = 0; u < n; ++u) labels[u] = u % 2;
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix xp(n, 3);
    std::vector<std::uint8_t> lp(n);
    std::vector<std::vector<Edge>> relp(2);
    for (std::size_t u = 0; u < n; ++u) {
      xp.row(perm[u]) = x.row(u);
      lp[perm[u]] = labels[u];
    }
    for (std::size_t r = 0; r < 2; ++r) {
      for (const auto& e : rel[r]) relp[r].emplace_back(perm[e.first], perm[e.second]);
    }
    const MultiRelationGraph g(x, labels, rel), gp(xp, lp, relp);
    for (NormMode norm : {NormMode::None, NormMode::NodeWise, NormMode::BatchWise}) {
      Model a(small_config(g, SimilarityMode::Cosine, norm), 9);
      Model b(small_config(g, SimilarityMode::Cosine, norm), 9);
      Tape tape;
      const Matrix& ya = a.forward(tape, g, ForwardContext{}).layers.back().logits.value();
      const Matrix& yb = b.forward(tape, gp, ForwardContext{}).layers.back().logits.value();
      for (std::size_t u = 0; u < n; ++u) {
        EXPECT_LT((ya.row(u) - yb.row(perm[u])).cwiseAbs().maxCoeff(), 1e-10);
      }
    }
  }
}

TEST(Model, InputProjection) {
  std::mt19937_64 rng(8);
  auto f = random_fixture(rng, 6, 4, 1, 5);
  Model model(small_config(f.g, SimilarityMode::Cosine, NormMode::None), 1);
  Tape tape;
  const Matrix got = model.input_projection(tape, f.g.features()).value();
  const Matrix want = ((f.g.features() * model.input_weight().value).rowwise() +
                       model.input_bias().value.row(0))
                          .cwiseMax(0.0);
  EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(model.input_projection(tape, Matrix::Ones(6, 3)), ShapeError);
}

TEST(Model, TotalLossHandOracle) {
  Tape tape;
  const Matrix z1 = (Matrix(2, 2) << 0, 0, 1, -1).finished();
  const Matrix z2 = (Matrix(2, 2) << 2, 0, 0, 0).finished();
  const std::vector<Tensor> logits{tape.constant(z1), tape.constant(z2)};
  const std::vector<int> y{0, 1};
  const std::vector<Tensor> sim{tape.constant(Matrix::Constant(1, 1, 0.25)),
                                tape.constant(Matrix::Constant(1, 1, 0.5))};
  const std::vector<double> w{1.0, 1.0};
  auto ce = [](double a, double b, int label) {
    const double lse = std::log(std::exp(a) + std::exp(b));
    return lse - (label == 0 ? a : b);
  };
  const double ce1 = (ce(0, 0, 0) + ce(1, -1, 1)) / 2, ce2 = (ce(2, 0, 0) + ce(0, 0, 1)) / 2;
  for (double lambda : {0.0, 1.0, 2.5}) {
    const auto loss = total_loss(logits, y, sim, lambda, w);
    EXPECT_NEAR(loss.total.scalar(), ce1 + ce2 + lambda * 0.75, 1e-14);
    EXPECT_NEAR(loss.cross_entropy[0], ce1, 1e-14);
    EXPECT_NEAR(loss.cross_entropy[1], ce2, 1e-14);
  }
  EXPECT_THROW(total_loss(logits, y, std::vector<Tensor>{sim[0]}, 1.0, w), std::invalid_argument);
}

TEST(Model, PredictRangeAndNeutralClassifier) {
  std::mt19937_64 rng(9);
  auto f = random_fixture(rng, 20, 3, 2, 30);
  Model model(small_config(f.g, SimilarityMode::Cosine, NormMode::NodeWise), 2);
  std::vector<NodeId> all(20);
  std::iota(all.begin(), all.end(), 0);
  for (double p : predict(model, f.g, all)) {
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
  model.layers().back().classifier_weight.value.setZero();
  for (double p : predict(model, f.g, all)) EXPECT_EQ(p, 0.5);
  EXPECT_THROW(predict(model, f.g, std::vector<NodeId>{20}), std::out_of_range);
}

TEST(Model, CheckpointRoundTrip) {
  std::mt19937_64 rng(10);
  auto f = random_fixture(rng, 15, 3, 2, 20);
  Checkpoint ck{Model(small_config(f.g, SimilarityMode::L1, NormMode::BatchWise), 3), 0.4, 77};
  randomize_thresholds(ck.model, rng);
  ck.model.layers()[2].running.mean = random_matrix(1, 5, rng);
  ck.model.layers()[2].running.var = random_matrix(1, 5, rng).cwiseAbs();
  const auto path = std::filesystem::temp_directory_path() /
                    ("lcgnn_ckpt_" + std::to_string(::getpid()) + ".tsv");
  save_checkpoint(ck, path);
  Checkpoint back = load_checkpoint(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.train_fraction, 0.4);
  EXPECT_EQ(back.model.thresholds(), ck.model.thresholds());
  EXPECT_EQ(back.model.config().similarity, SimilarityMode::L1);
  EXPECT_EQ(back.model.config().norm.mode, NormMode::BatchWise);
  const auto pa = ck.model.parameters(), pb = back.model.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i]->name, pb[i]->name);
    EXPECT_EQ(pa[i]->value, pb[i]->value);
  }
  EXPECT_EQ(back.model.layers()[2].running.mean, ck.model.layers()[2].running.mean);
  std::vector<NodeId> all(15);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(predict(back.model, f.g, all), predict(ck.model, f.g, all));
}

}  // namespace
}  // namespace lcgnn
