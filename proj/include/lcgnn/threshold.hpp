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
#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

namespace lcgnn {

struct ThresholdConfig {
  double initial = 0.5;
  double step = 0.02;
  std::size_t window = 10;
  /// An arm freezes once its last `window` rewards sum to at least this value.
  int freeze_sum = 8;
};

/// Per-(layer, relation) bandit that moves the neighbor-keep ratio p by one step per
/// epoch: up when the average selected distance did not increase, down otherwise.
class ThresholdController {
 public:
  ThresholdController(std::size_t layers, std::size_t relations, const ThresholdConfig& cfg = {});

  /// avg_distance[l][r] is the epoch's mean selected-neighbor distance; nullopt skips
  /// that arm (no selections observed). Throws std::invalid_argument on NaN.
  void observe_epoch(const std::vector<std::vector<std::optional<double>>>& avg_distance);

  double threshold(std::size_t layer, std::size_t relation) const;
  bool frozen(std::size_t layer, std::size_t relation) const;
  std::vector<std::vector<double>> thresholds() const;
  const ThresholdConfig& config() const { return cfg_; }

 private:
  struct Arm {
    double p = 0.5;
    std::optional<double> last_distance;
    std::deque<int> rewards;
    bool frozen = false;
  };

  const Arm& arm(std::size_t layer, std::size_t relation) const;

  std::size_t layers_;
  std::size_t relations_;
  ThresholdConfig cfg_;
  std::vector<Arm> arms_;
};

}  // namespace lcgnn
