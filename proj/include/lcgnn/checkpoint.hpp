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

#include "lcgnn/model.hpp"

#include <cstdint>
#include <filesystem>

namespace lcgnn {

/// Everything needed to rebuild a trained model and its data split.
struct Checkpoint {
  Model model;
  double train_fraction = 0.4;
  std::uint64_t seed = 1;
};

/// Versioned TSV dump; reals are written as hexadecimal floats so reloading is bit-exact.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lcgnn
