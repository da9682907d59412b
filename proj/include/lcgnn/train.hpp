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

#include "lcgnn/adam.hpp"
#include "lcgnn/graph.hpp"
#include "lcgnn/metrics.hpp"
#include "lcgnn/model.hpp"
#include "lcgnn/threshold.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace lcgnn {

struct TrainConfig {
  /// input_dim and num_relations are taken from the graph; class weights are derived
  /// from the training split (benign / fraud) unless `fixed_class_weights` is set.
  ModelConfig model;
  AdamConfig adam;
  ThresholdConfig thresholds;
  double train_fraction = 0.4;
  std::size_t batch_size = 512;
  std::size_t epochs = 200;
  std::uint64_t seed = 1;
  bool fixed_class_weights = false;
  bool evaluate_each_epoch = true;

  void validate() const;
};

struct Split {
  std::vector<NodeId> train;
  std::vector<NodeId> test;
};

/// Seeded split preserving the fraud ratio: round(fraction * class size) of each class
/// goes to training. Both lists come back sorted.
Split stratified_split(std::span<const std::uint8_t> labels, double train_fraction,
                       std::uint64_t seed);

/// The split train_model uses for a run seed.
Split run_split(std::span<const std::uint8_t> labels, double train_fraction, std::uint64_t seed);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  std::vector<double> layer_loss;        // mean cross-entropy per layer over the epoch's batches
  std::vector<double> layer_similarity;  // mean similarity loss per layer
  double total_loss = 0.0;               // mean total objective over batches
  /// Thresholds in effect during this epoch, [layer][relation].
  std::vector<std::vector<double>> thresholds;
  /// Mean selected-neighbor distance over training centers, [layer][relation].
  std::vector<std::vector<std::optional<double>>> avg_distance;
  /// Mean same-label fraction among selected labeled neighbors, per layer.
  std::vector<double> label_agreement;
  std::optional<EvalReport> test;
};

struct TrainResult {
  Model model;
  Split split;
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Minibatch training with per-layer supervision. Each step runs the full graph
/// forward and supervises the batch centers. Throws NumericError on a non-finite loss.
TrainResult train_model(const MultiRelationGraph& g, const TrainConfig& cfg,
                        const EpochCallback& on_epoch = {});

/// Inference-mode evaluation on the given nodes.
EvalReport evaluate(Model& model, const MultiRelationGraph& g, std::span<const NodeId> nodes);

/// Label agreement between centers and their selected neighbors, per layer, over the
/// given centers. Only neighbors flagged in `labeled` count.
std::vector<double> selection_label_agreement(const ForwardResult& fwd,
                                              const MultiRelationGraph& g,
                                              std::span<const NodeId> centers,
                                              std::span<const std::uint8_t> labeled);

}  // namespace lcgnn
