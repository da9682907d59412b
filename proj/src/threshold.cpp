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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lcgnn {

ThresholdController::ThresholdController(std::size_t layers, std::size_t relations,
                                         const ThresholdConfig& cfg)
    : layers_(layers), relations_(relations), cfg_(cfg) {
  if (!(cfg_.step > 0.0 && cfg_.step <= 1.0)) {
    throw std::invalid_argument("threshold step must lie in (0, 1]");
  }
  if (!(cfg_.initial >= cfg_.step && cfg_.initial <= 1.0)) {
    throw std::invalid_argument("initial threshold must lie in [step, 1]");
  }
  if (cfg_.window == 0) throw std::invalid_argument("reward window must be >= 1");
  Arm a;
  a.p = cfg_.initial;
  arms_.assign(layers * relations, a);
}

const ThresholdController::Arm& ThresholdController::arm(std::size_t layer,
                                                         std::size_t relation) const {
  if (layer >= layers_ || relation >= relations_) throw std::out_of_range("threshold arm");
  return arms_[layer * relations_ + relation];
}

void ThresholdController::observe_epoch(
    const std::vector<std::vector<std::optional<double>>>& avg_distance) {
  if (avg_distance.size() != layers_) throw std::invalid_argument("observe_epoch: layer count");
  for (std::size_t l = 0; l < layers_; ++l) {
    if (avg_distance[l].size() != relations_) {
      throw std::invalid_argument("observe_epoch: relation count");
    }
    for (const auto& d : avg_distance[l]) {
      if (d && std::isnan(*d)) throw std::invalid_argument("observe_epoch: NaN distance");
    }
  }
  for (std::size_t l = 0; l < layers_; ++l) {
    for (std::size_t r = 0; r < relations_; ++r) {
      Arm& a = arms_[l * relations_ + r];
      const auto& d = avg_distance[l][r];
      if (a.frozen || !d) continue;
      if (!a.last_distance) {
        a.last_distance = *d;
        continue;
      }
      const int reward = *d <= *a.last_distance ? 1 : -1;
      a.last_distance = *d;
      a.p = std::clamp(a.p + cfg_.step * reward, cfg_.step, 1.0);
      a.rewards.push_back(reward);
      if (a.rewards.size() > cfg_.window) a.rewards.pop_front();
      if (a.rewards.size() == cfg_.window &&
          std::accumulate(a.rewards.begin(), a.rewards.end(), 0) >= cfg_.freeze_sum) {
        a.frozen = true;
      }
    }
  }
}

double ThresholdController::threshold(std::size_t layer, std::size_t relation) const {
  return arm(layer, relation).p;
}

bool ThresholdController::frozen(std::size_t layer, std::size_t relation) const {
  return arm(layer, relation).frozen;
}

std::vector<std::vector<double>> ThresholdController::thresholds() const {
  std::vector<std::vector<double>> out(layers_, std::vector<double>(relations_));
  for (std::size_t l = 0; l < layers_; ++l) {
    for (std::size_t r = 0; r < relations_; ++r) out[l][r] = arms_[l * relations_ + r].p;
  }
  return out;
}

}  // namespace lcgnn
