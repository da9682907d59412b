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
#include "lcgnn/threshold.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace lcgnn {
namespace {

using Obs = std::vector<std::vector<std::optional<double>>>;

Obs single(double d) { return {{d}}; }

TEST(Threshold, FirstEpochOnlySetsBaseline) {
  ThresholdController c(1, 1);
  EXPECT_EQ(c.threshold(0, 0), 0.5);
  c.observe_epoch(single(0.3));
  EXPECT_EQ(c.threshold(0, 0), 0.5);
}

TEST(Threshold, DecreasingDistancesRaiseP) {
  ThresholdController c(1, 1);
  c.observe_epoch(single(0.30));
  c.observe_epoch(single(0.25));
  c.observe_epoch(single(0.20));
  EXPECT_NEAR(c.threshold(0, 0), 0.54, 1e-12);
  c.observe_epoch(single(0.40));
  EXPECT_NEAR(c.threshold(0, 0), 0.52, 1e-12);
  c.observe_epoch(single(0.40));  // equal counts as improvement
  EXPECT_NEAR(c.threshold(0, 0), 0.54, 1e-12);
}

TEST(Threshold, ClampsAtBothEnds) {
  ThresholdController up(1, 1, ThresholdConfig{0.98, 0.02, 100, 101});
  for (int e = 0; e < 5; ++e) up.observe_epoch(single(1.0 - 0.1 * e));
  EXPECT_EQ(up.threshold(0, 0), 1.0);
  ThresholdController down(1, 1, ThresholdConfig{0.04, 0.02, 100, 101});
  for (int e = 0; e < 5; ++e) down.observe_epoch(single(0.1 * e));
  EXPECT_EQ(down.threshold(0, 0), 0.02);
}

TEST(Threshold, FreezesAfterConsistentRewards) {
  ThresholdController c(1, 1);
  c.observe_epoch(single(1.0));
  for (int e = 1; e <= 9; ++e) c.observe_epoch(single(1.0 - 0.01 * e));
  EXPECT_FALSE(c.frozen(0, 0));
  c.observe_epoch(single(0.5));
  EXPECT_TRUE(c.frozen(0, 0));
  const double p = c.threshold(0, 0);
  EXPECT_NEAR(p, 0.7, 1e-12);
  for (int e = 0; e < 20; ++e) c.observe_epoch(single(e % 2 ? 0.1 : 0.9));
  EXPECT_EQ(c.threshold(0, 0), p);
}

TEST(Threshold, MixedRewardsDoNotFreeze) {
  ThresholdController c(1, 1);
  c.observe_epoch(single(0.5));
  for (int e = 0; e < 40; ++e) c.observe_epoch(single(e % 3 == 0 ? 0.9 : 0.5));
  EXPECT_FALSE(c.frozen(0, 0));
}

TEST(Threshold, ArmsAreIndependentAndSkipMissing) {
  ThresholdController c(2, 2);
  c.observe_epoch({{0.5, 0.5}, {0.5, std::nullopt}});
  c.observe_epoch({{0.4, 0.6}, {std::nullopt, 0.5}});
  EXPECT_NEAR(c.threshold(0, 0), 0.52, 1e-12);
  EXPECT_NEAR(c.threshold(0, 1), 0.48, 1e-12);
  EXPECT_EQ(c.threshold(1, 0), 0.5);
  EXPECT_EQ(c.threshold(1, 1), 0.5);
  c.observe_epoch({{0.4, 0.6}, {0.1, 0.1}});
  EXPECT_NEAR(c.threshold(1, 0), 0.52, 1e-12);
  EXPECT_NEAR(c.threshold(1, 1), 0.52, 1e-12);
}

TEST(Threshold, RandomSequencesStayInRange) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  ThresholdController a(3, 2), b(3, 2);
  auto prev = a.thresholds();
  std::vector<std::vector<bool>> was_frozen(3, std::vector<bool>(2, false));
  for (int e = 0; e < 300; ++e) {
    Obs o(3, std::vector<std::optional<double>>(2));
    for (auto& row : o) for (auto& d : row) d = u(rng);
    a.observe_epoch(o);
    b.observe_epoch(o);
    const auto now = a.thresholds();
    EXPECT_EQ(now, b.thresholds());
    for (std::size_t l = 0; l < 3; ++l) {
      for (std::size_t r = 0; r < 2; ++r) {
        EXPECT_GE(now[l][r], 0.02 - 1e-12);
        EXPECT_LE(now[l][r], 1.0);
        const double step = std::abs(now[l][r] - prev[l][r]);
        EXPECT_TRUE(step < 1e-12 || std::abs(step - 0.02) < 1e-12) << step;
        if (was_frozen[l][r]) {
          EXPECT_LT(step, 1e-15);
        }
        was_frozen[l][r] = a.frozen(l, r);
      }
    }
    prev = now;
  }
}

TEST(Threshold, RejectsBadInput) {
  ThresholdController c(1, 2);
  EXPECT_THROW(c.observe_epoch({{0.1, std::numeric_limits<double>::quiet_NaN()}}), std::invalid_argument);
  EXPECT_THROW(c.observe_epoch({{0.1}}), std::invalid_argument);
  EXPECT_THROW(c.observe_epoch({}), std::invalid_argument);
  EXPECT_THROW(c.threshold(1, 0), std::out_of_range);
  EXPECT_THROW(ThresholdController(1, 1, ThresholdConfig{0.5, 0.0, 10, 8}), std::invalid_argument);
  EXPECT_THROW(ThresholdController(1, 1, ThresholdConfig{0.5, 0.02, 0, 8}), std::invalid_argument);
}

}  // namespace
}  // namespace lcgnn
