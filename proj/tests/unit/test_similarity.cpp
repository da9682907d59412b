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
#include "lcgnn/similarity.hpp"

#include "gradcheck.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace lcgnn {
namespace {

using testing::check_gradient;
using testing::random_matrix;

std::vector<double> v(std::initializer_list<double> x) { return x; }

TEST(Cosine, EmbeddedExamples) {
  EXPECT_DOUBLE_EQ(cosine_distance_embedded(v({1, 0}), v({0, 1})).distance, 1.0);
  EXPECT_NEAR(cosine_distance_embedded(v({1, 2}), v({2, 1})).distance, 0.2, 1e-15);
  EXPECT_NEAR(cosine_distance_embedded(v({1, 2}), v({-1, -2})).distance, 2.0, 1e-15);
}

TEST(Cosine, ZeroNormIsDegenerate) {
  const auto r = cosine_distance_embedded(v({0, 0}), v({0.3, 1}));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.distance, 1.0);
  EXPECT_THROW(cosine_distance_embedded(v({std::nan(""), 0}), v({1, 1})), NumericError);
}

TEST(Cosine, ModuleIdenticalInputsAndRange) {
  std::mt19937_64 rng(1);
  const auto m = make_similarity_module(SimilarityMode::Cosine, 5, 8, rng, "t");
  EXPECT_EQ(m.embed_dim(), 8u);
  const Matrix h = random_matrix(30, 5, rng);
  for (Eigen::Index i = 0; i < 30; ++i) {
    const auto hu = testing::row_of(h, static_cast<std::size_t>(i));
    EXPECT_NEAR(cosine_distance(m, hu, hu).distance, 0.0, 1e-15);
    const auto hv = testing::row_of(h, static_cast<std::size_t>((i + 1) % 30));
    const double d = cosine_distance(m, hu, hv).distance;
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 2.0);
  }
  EXPECT_THROW(cosine_distance(m, v({1, 2}), v({1, 2})), ShapeError);
}

TEST(L1, ExamplesAndSymmetry) {
  EXPECT_DOUBLE_EQ(l1_distance_embedded(v({1, 0}), v({0, 1})), 1.0);
  std::mt19937_64 rng(2);
  const auto m = make_similarity_module(SimilarityMode::L1, 4, 8, rng, "t");
  EXPECT_EQ(m.embed_dim(), 2u);
  const Matrix h = random_matrix(20, 4, rng, 3.0);
  for (std::size_t i = 0; i + 1 < 20; ++i) {
    const auto a = testing::row_of(h, i), b = testing::row_of(h, i + 1);
    EXPECT_EQ(l1_distance(m, a, a), 0.0);
    const double d = l1_distance(m, a, b);
    EXPECT_EQ(d, l1_distance(m, b, a));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(Select, SpecExamples) {
  const std::vector<NodeId> c{10, 11, 12};
  const auto half = select_by_distance(0, 0, c, {0.1, 0.5, 0.3}, 0.5);
  EXPECT_EQ(half.kept, (std::vector<NodeId>{10, 12}));
  EXPECT_EQ(half.kept_distances, (std::vector<double>{0.1, 0.3}));
  EXPECT_EQ(select_by_distance(0, 0, c, {0.1, 0.5, 0.3}, 0.67).kept.size(), 3u);
  EXPECT_EQ(select_by_distance(0, 0, c, {0.1, 0.5, 0.3}, 1.0).kept.size(), 3u);
  EXPECT_EQ(select_by_distance(0, 0, {7}, {0.9}, 0.02).kept, std::vector<NodeId>{7});
  EXPECT_TRUE(select_by_distance(0, 0, {}, {}, 0.5).kept.empty());
}

TEST(Select, TiesBreakByNodeId) {
  const auto s = select_by_distance(0, 0, {9, 4, 6, 2}, {0.5, 0.5, 0.1, 0.5}, 0.5);
  EXPECT_EQ(s.kept, (std::vector<NodeId>{6, 2}));
}

TEST(Select, RejectsBadThreshold) {
  EXPECT_THROW(select_by_distance(0, 0, {1}, {0.1}, 0.0), std::invalid_argument);
  EXPECT_THROW(select_by_distance(0, 0, {1}, {0.1}, 1.5), std::invalid_argument);
  EXPECT_THROW(select_by_distance(0, 0, {1, 2}, {0.1}, 0.5), std::invalid_argument);
}

TEST(Select, KeepCountRule) {
  EXPECT_EQ(keep_count(0.5, 0), 0u);
  EXPECT_EQ(keep_count(0.01, 5), 1u);
  EXPECT_EQ(keep_count(0.5, 3), 2u);
  EXPECT_EQ(keep_count(0.5 + 0.02 + 0.02, 50), 27u);
}

TEST(Select, MatchesSortOracleAndIsMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> len(0, 25);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = len(rng);
    std::vector<NodeId> c(static_cast<std::size_t>(n));
    std::vector<double> d(c.size());
    for (int i = 0; i < n; ++i) {
      c[static_cast<std::size_t>(i)] = static_cast<NodeId>(3 * i + 1);
      // Coarse values force ties.
      d[static_cast<std::size_t>(i)] = std::round(u(rng) * 8.0) / 8.0;
    }
    std::shuffle(c.begin(), c.end(), rng);
    const double p = std::max(0.01, u(rng));
    const auto got = select_by_distance(0, 0, c, d, p);
    EXPECT_EQ(got.kept, testing::sort_select(c, d, p));
    const auto wider = select_by_distance(0, 0, c, d, std::min(1.0, p + 0.2));
    EXPECT_TRUE(std::equal(got.kept.begin(), got.kept.end(), wider.kept.begin()));
  }
}

TEST(Select, NeighborsEmbedsThenSelects) {
  std::mt19937_64 rng(4);
  const auto m = make_similarity_module(SimilarityMode::Cosine, 3, 8, rng, "t");
  const Matrix feats = random_matrix(6, 3, rng);
  const Matrix center = random_matrix(1, 3, rng);
  const std::vector<NodeId> ids{5, 1, 8, 3, 0, 2};
  const auto s = select_neighbors(m, testing::row_of(center, 0), feats, ids, 0.5);
  std::vector<double> d;
  for (std::size_t i = 0; i < 6; ++i) {
    d.push_back(cosine_distance(m, testing::row_of(center, 0), testing::row_of(feats, i)).distance);
  }
  EXPECT_EQ(s.kept, testing::sort_select(ids, d, 0.5));
}

TEST(SimilarityLoss, SpecExamples) {
  Tape tape;
  const Matrix d = (Matrix(2, 1) << 0.2, 0.1).finished();
  const std::vector<std::uint8_t> same{1, 0};
  EXPECT_NEAR(margin_pair_loss(tape.constant(d), same, 0.5).scalar(), 0.3, 1e-15);
  const std::vector<std::uint8_t> all_same{1, 1};
  EXPECT_EQ(margin_pair_loss(tape.constant(Matrix::Zero(2, 1)), all_same, 0.5).scalar(), 0.0);
  const std::vector<std::uint8_t> diff{0};
  EXPECT_EQ(margin_pair_loss(tape.constant(Matrix::Constant(1, 1, 0.7)), diff, 0.5).scalar(), 0.0);
  std::mt19937_64 rng(5);
  auto m = make_similarity_module(SimilarityMode::Cosine, 3, 8, rng, "t");
  EXPECT_EQ(similarity_loss(tape, m, tape.constant(Matrix::Ones(2, 3)), {}).scalar(), 0.0);
}

TEST(SimilarityLoss, PairsPullAndPush) {
  std::mt19937_64 rng(6);
  auto m = make_similarity_module(SimilarityMode::Cosine, 4, 8, rng, "t");
  Tape tape;
  Tensor h = tape.constant(random_matrix(4, 4, rng));
  const std::vector<SimilarityPair> pairs{{0, 1, true}, {2, 3, false}};
  const double d01 = cosine_distance(m, testing::row_of(h.value(), 0), testing::row_of(h.value(), 1)).distance;
  const double d23 = cosine_distance(m, testing::row_of(h.value(), 2), testing::row_of(h.value(), 3)).distance;
  const double expect = (d01 + std::max(0.0, 0.5 - d23)) / 2.0;
  EXPECT_NEAR(similarity_loss(tape, m, h, pairs).scalar(), expect, 1e-14);
}

TEST(SimilarityGradients, CosineAndLoss) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(4, 3, rng), b = random_matrix(4, 3, rng);
    EXPECT_LT(check_gradient({a, b}, [](Tape&, const std::vector<Tensor>& x) {
                return testing::random_projection(cosine_distance_rows(x[0], x[1]), 1);
              }).relative_error, 1e-4);
    const Matrix da = (Matrix(4, 1) << 0.2, 0.3, 0.45, 0.8).finished();
    const std::vector<std::uint8_t> same{1, 0, 0, 1};
    EXPECT_LT(check_gradient({da}, [&](Tape&, const std::vector<Tensor>& x) {
                return margin_pair_loss(x[0], same, 0.5);
              }).relative_error, 1e-4);
  }
}

TEST(SimilarityGradients, ThroughModuleParameters) {
  std::mt19937_64 rng(8);
  for (SimilarityMode mode : {SimilarityMode::Cosine, SimilarityMode::L1}) {
    auto m = make_similarity_module(mode, 3, 8, rng, "t");
    const Matrix h = random_matrix(6, 3, rng);
    const std::vector<SimilarityPair> pairs{{0, 1, true}, {2, 3, false}, {4, 5, false}, {1, 4, true}};
    const auto r = check_gradient({m.weight.value, m.bias.value},
                                  [&](Tape& t, const std::vector<Tensor>& x) {
                                    Tensor h0 = t.constant(h);
                                    Tensor za = add(matmul(gather_rows(h0, std::vector<std::size_t>{0, 2, 4, 1}), x[0]), x[1]);
                                    Tensor zb = add(matmul(gather_rows(h0, std::vector<std::size_t>{1, 3, 5, 4}), x[0]), x[1]);
                                    Tensor d = mode == SimilarityMode::Cosine
                                                   ? cosine_distance_rows(tanh(za), tanh(zb))
                                                   : l1_distance_rows(softmax_rows(za), softmax_rows(zb));
                                    return margin_pair_loss(d, std::vector<std::uint8_t>{1, 0, 0, 1}, 0.5);
                                  });
    EXPECT_LT(r.relative_error, 1e-4) << to_string(mode);
  }
}

TEST(SimilarityMode, Parse) {
  EXPECT_EQ(parse_similarity_mode("cosine"), SimilarityMode::Cosine);
  EXPECT_EQ(parse_similarity_mode("l1"), SimilarityMode::L1);
  EXPECT_THROW(parse_similarity_mode("euclid"), std::invalid_argument);
}

}  // namespace
}  // namespace lcgnn
