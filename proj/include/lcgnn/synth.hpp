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

#include "lcgnn/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lcgnn {

/// Labeled multi-relation graph with Gaussian class clusters.
struct SynthConfig {
  std::size_t num_nodes = 2000;
  double fraud_ratio = 0.145;
  std::size_t num_relations = 3;
  /// Target mean degree per relation.
  std::vector<double> mean_degree{2.0, 5.0, 16.0};
  /// Relative acceptance weight of a same-label pair against a cross-label pair, per
  /// relation: q = 1 admits only same-label edges, q = 0.5 ignores labels.
  std::vector<double> same_label_weight{0.95, 0.7, 0.55};
  std::size_t feature_dim = 32;
  /// Euclidean distance between the benign and fraud cluster means (unit variance).
  double separation = 1.0;
  /// Fraction of fraud nodes whose features are drawn from the benign cluster.
  double camouflage = 0.3;
  std::uint64_t seed = 1;

  void validate() const;
};

/// "sparse" (Yelp-like) or "dense" (Amazon-like: relations 1-2 are 19x denser).
SynthConfig synth_preset(const std::string& name);

/// Throws std::invalid_argument for an invalid or infeasible configuration.
MultiRelationGraph generate(const SynthConfig& cfg);

}  // namespace lcgnn
