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

#include "lcgnn/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lcgnn {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates, one pair per parameter in registration order.
struct AdamState {
  AdamConfig config;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::int64_t step = 0;
};

AdamState make_adam_state(std::span<Parameter* const> params, const AdamConfig& config = {});

/// Applies one bias-corrected Adam update from each parameter's accumulated grad.
/// Does not zero the gradients.
void adam_step(std::span<Parameter* const> params, AdamState& state);

}  // namespace lcgnn
