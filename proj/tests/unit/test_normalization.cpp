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
#include "lcgnn/normalization.hpp"

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace lcgnn {
namespace {

using testing::BatchStats;
using testing::random_messages;
using testing::CenterMessages;
using testing::check_gradient;
using testing::random_matrix;

TEST(NodeWise, HandExample) {
  Tape tape;
  const Matrix h = (Matrix(1, 2) << 4, 0).finished();
  const Matrix s = (Matrix(1, 2) << 2, 2).finished();
  const std::vector<double> n{1};
  const Matrix out = node_wise_normalize(tape.constant(h), tape.constant(s), n, 1e-5).value();
  EXPECT_NEAR(out(0, 0), 2.0 / std::sqrt(1e-5), 1e-9);
  EXPECT_NEAR(out(0, 1), -2.0 / std::sqrt(1e-5), 1e-9);
}

TEST(NodeWise, EqualToMeanGivesZero) {
  Tape tape;
  const Matrix h = Matrix::Constant(1, 3, 2.0);
  const Matrix s = Matrix::Constant(1, 3, 4.0);
  const std::vector<double> n{2};
  EXPECT_EQ(node_wise_normalize(tape.constant(h), tape.constant(s), n, 1e-5).value().norm(), 0.0);
}

TEST(NodeWise, DoublingMessagesDoublesMean) {
  // Two copies of a neighbor with p = 1: S doubles and n doubles, so mu is unchanged,
  // while doubling S alone doubles mu.
  std::mt19937_64 rng(1);
  const Matrix h = random_matrix(1, 4, rng);
  const Matrix s = random_matrix(1, 4, rng);
  const std::vector<double> one{1}, two{2};
  const double mu1 = s.sum() / 4.0;
  Tape tape;
  const Matrix a = node_wise_normalize(tape.constant(h), tape.constant(s), one, 1.0).value();
  const Matrix b = node_wise_normalize(tape.constant(h), tape.constant(2 * s), two, 1.0).value();
  const double mu2 = 2 * s.sum() / 8.0;
  EXPECT_NEAR(mu1, mu2, 1e-15);
  const double var1 = (s.array() - mu1).square().sum() / 4.0;
  EXPECT_NEAR(a(0, 0), (h(0, 0) - mu1) / std::sqrt(var1 + 1.0), 1e-12);
  const double var2 = (2 * s.array() - mu2).square().sum() / 8.0;
  EXPECT_NEAR(b(0, 0), (h(0, 0) - mu2) / std::sqrt(var2 + 1.0), 1e-12);
}

TEST(NodeWise, NoSelectionPassesThrough) {
  std::mt19937_64 rng(2);
  const Matrix h = random_matrix(3, 4, rng);
  Tape tape;
  const std::vector<double> n{0, 2, 0};
  const Matrix out = node_wise_normalize(tape.constant(h), tape.constant(random_matrix(3, 4, rng)), n, 1e-5).value();
  EXPECT_EQ(out.row(0), h.row(0));
  EXPECT_EQ(out.row(2), h.row(2));
  EXPECT_NE(out.row(1), h.row(1));
}

TEST(NodeWise, MatchesOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_messages(rng, 6, 5, 3);
    Tape tape;
    const Matrix out = node_wise_normalize(tape.constant(in.h), tape.constant(in.sums), in.n, 1e-3).value();
    for (std::size_t j = 0; j < 6; ++j) {
      const auto want = testing::node_wise_oracle(testing::row_of(in.h, j), in.centers[j], in.p, 1e-3);
      for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)), want[i], 1e-12);
      }
    }
  }
}

TEST(BatchWise, MatchesLiteralLoops) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_messages(rng, 8, 4, 2);
    std::vector<std::uint8_t> flags(8);
    for (auto& f : flags) f = coin(rng);
    NormConfig cfg{NormMode::BatchWise, 1e-5, 0.9};
    RunningStats rs = RunningStats::identity(4);
    Tape tape;
    const Matrix out = batch_wise_normalize(tape.constant(in.h), tape.constant(in.sums), in.n, flags,
                                            true, cfg, rs).value();
    const BatchStats st = testing::batch_stats_oracle(in.centers, in.p, flags, 4);
    std::size_t members = 0;
    for (std::size_t j = 0; j < 8; ++j) members += flags[j] && in.n[j] > 0;
    for (std::size_t j = 0; j < 8; ++j) {
      const auto hj = testing::row_of(in.h, j);
      // With no member rows the running statistics stand in.
      const auto want = in.n[j] == 0 ? hj
                        : members == 0
                            ? testing::batch_apply(hj, BatchStats{std::vector<double>(4, 0.0), std::vector<double>(4, 1.0)}, 1e-5)
                            : testing::batch_apply(hj, st, 1e-5);
      for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)), want[i], 1e-12);
      }
    }
  }
}

TEST(BatchWise, SymmetricMessagesHaveZeroMean) {
  Tape tape;
  const Matrix h = (Matrix(2, 2) << 1, 2, 3, 4).finished();
  const Matrix s = (Matrix(2, 2) << 1, -2, -1, 2).finished();
  const std::vector<double> n{1, 1};
  NormConfig cfg{NormMode::BatchWise, 1e-5, 0.0};
  RunningStats rs = RunningStats::identity(2);
  batch_wise_normalize(tape.constant(h), tape.constant(s), n, {}, true, cfg, rs);
  EXPECT_EQ(rs.mean(0, 0), 0.0);
  EXPECT_EQ(rs.mean(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(rs.var(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(rs.var(0, 1), 4.0);
}

TEST(BatchWise, StatsRowsRestrictStatisticsButNormalizeAll) {
  Tape tape;
  const Matrix h = (Matrix(3, 1) << 1, 2, 3).finished();
  const Matrix s = (Matrix(3, 1) << 2, 100, 0).finished();
  const std::vector<double> n{1, 1, 1};
  const std::vector<std::uint8_t> flags{1, 0, 0};
  NormConfig cfg{NormMode::BatchWise, 0.5, 0.9};
  RunningStats rs = RunningStats::identity(1);
  const Matrix out = batch_wise_normalize(tape.constant(h), tape.constant(s), n, flags, true, cfg, rs).value();
  // mu = 2, sigma2 = 0.
  EXPECT_NEAR(out(0, 0), -1.0 / std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(out(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(out(2, 0), 1.0 / std::sqrt(0.5), 1e-15);
}

TEST(BatchWise, RunningStatsUpdateAndInference) {
  Tape tape;
  const Matrix h = (Matrix(2, 1) << 0, 10).finished();
  const Matrix s = (Matrix(2, 1) << 4, 8).finished();
  const std::vector<double> n{2, 2};
  NormConfig cfg{NormMode::BatchWise, 1e-5, 0.9};
  RunningStats rs = RunningStats::identity(1);
  EXPECT_EQ(rs.mean(0, 0), 0.0);
  EXPECT_EQ(rs.var(0, 0), 1.0);
  batch_wise_normalize(tape.constant(h), tape.constant(s), n, {}, true, cfg, rs);
  // mu = (2 + 4) / 2 = 3; sigma2 = ((4-3)^2/2 + (8-3)^2/2) / 2 = 6.5.
  EXPECT_NEAR(rs.mean(0, 0), 0.1 * 3.0, 1e-15);
  EXPECT_NEAR(rs.var(0, 0), 0.9 + 0.1 * 6.5, 1e-15);
  const RunningStats before = rs;
  const Matrix out = batch_wise_normalize(tape.constant(h), tape.constant(s), n, {}, false, cfg, rs).value();
  EXPECT_EQ(rs.mean, before.mean);
  EXPECT_NEAR(out(1, 0), (10 - 0.3) / std::sqrt(1.55 + 1e-5), 1e-12);
}

TEST(BatchWise, SelfConsistentOnRepeatedBatch) {
  // With momentum 0 the running statistics equal the last batch, so inference on that
  // batch reproduces the training output.
  std::mt19937_64 rng(5);
  const auto in = random_messages(rng, 10, 3, 2);
  NormConfig cfg{NormMode::BatchWise, 1e-3, 0.0};
  RunningStats rs = RunningStats::identity(3);
  Tape tape;
  const Matrix a = batch_wise_normalize(tape.constant(in.h), tape.constant(in.sums), in.n, {}, true, cfg, rs).value();
  const Matrix b = batch_wise_normalize(tape.constant(in.h), tape.constant(in.sums), in.n, {}, false, cfg, rs).value();
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Normalization, RejectsBadInputs) {
  Tape tape;
  const std::vector<double> n{1};
  EXPECT_THROW(node_wise_normalize(tape.constant(Matrix::Ones(1, 2)), tape.constant(Matrix::Ones(1, 3)), n, 1e-5),
               ShapeError);
  RunningStats rs = RunningStats::identity(3);
  NormConfig cfg{NormMode::BatchWise, 1e-5, 0.9};
  EXPECT_THROW(batch_wise_normalize(tape.constant(Matrix::Ones(1, 2)), tape.constant(Matrix::Ones(1, 2)), n, {},
                                    true, cfg, rs),
               ShapeError);
  EXPECT_EQ(parse_norm_mode("batch"), NormMode::BatchWise);
  EXPECT_EQ(parse_norm_mode("node"), NormMode::NodeWise);
  EXPECT_EQ(parse_norm_mode("none"), NormMode::None);
  EXPECT_THROW(parse_norm_mode("layer"), std::invalid_argument);
}

TEST(NormalizationGradients, NodeWise) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_messages(rng, 4, 3, 2);
    const auto r = check_gradient({in.h, in.sums}, [&](Tape&, const std::vector<Tensor>& x) {
      return testing::random_projection(node_wise_normalize(x[0], x[1], in.n, 0.1), 7);
    });
    EXPECT_LT(r.relative_error, 1e-4);
  }
}

TEST(NormalizationGradients, BatchWise) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_messages(rng, 5, 3, 2);
    const std::vector<std::uint8_t> flags{1, 1, 0, 1, 1};
    const auto r = check_gradient({in.h, in.sums}, [&](Tape&, const std::vector<Tensor>& x) {
      RunningStats rs = RunningStats::identity(3);
      NormConfig cfg{NormMode::BatchWise, 0.1, 0.9};
      return testing::random_projection(batch_wise_normalize(x[0], x[1], in.n, flags, true, cfg, rs), 8);
    });
    EXPECT_LT(r.relative_error, 1e-4);
  }
}

}  // namespace
}  // namespace lcgnn
