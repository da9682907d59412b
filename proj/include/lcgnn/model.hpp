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
#include "lcgnn/normalization.hpp"
#include "lcgnn/similarity.hpp"
#include "lcgnn/tensor.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace lcgnn {

struct ModelConfig {
  std::size_t input_dim = 0;
  std::size_t num_relations = 0;
  std::size_t num_layers = 6;
  std::size_t hidden_dim = 64;
  /// First layer (1-based) whose candidate sets are same-relation 2-hop.
  /// num_layers + 1 keeps every layer 1-hop.
  std::size_t iis_start_layer = 4;
  SimilarityMode similarity = SimilarityMode::Cosine;
  std::size_t similarity_dim = 8;
  NormConfig norm;
  double lambda_sim = 1.0;
  double similarity_margin = kSimilarityMargin;
  /// Same-label and different-label pairs sampled per center for the similarity loss.
  std::size_t pairs_per_class = 5;
  std::array<double, 2> class_weights{1.0, 1.0};
  double initial_threshold = 0.5;

  void validate() const;
};

/// Learnable state of one layer.
struct LayerParams {
  SimilarityModule similarity;
  Parameter update_weight;      // 2*hidden x hidden
  Parameter update_bias;        // 1 x hidden
  Parameter classifier_weight;  // hidden x 2
  Parameter classifier_bias;    // 1 x 2
  std::vector<double> thresholds;  // one per relation, in (0, 1]
  RunningStats running;
};

enum class CandidateScope { OneHop, TwoHop };

struct LayerSelection {
  std::size_t layer = 0;  // 1-based
  CandidateScope scope = CandidateScope::OneHop;
  /// by_relation[r][u]: selection of center u under relation r.
  std::vector<std::vector<NeighborSelection>> by_relation;
  /// Selected neighbors of each node summed over relations.
  std::vector<double> n_selected;
};

struct ForwardContext {
  bool training = false;
  /// Centers supervised in this step; their rows feed batch-wise statistics.
  std::span<const NodeId> batch;
  /// Nodes whose labels may be used for similarity pairs (the training split).
  std::span<const std::uint8_t> labeled;
  /// Pair sampling randomness; required when training.
  std::mt19937_64* rng = nullptr;
};

struct LayerOutput {
  Tensor embeddings;  // N x hidden
  Tensor logits;      // N x 2
  Tensor similarity_loss;  // 1 x 1, valid only when training
  LayerSelection selection;
};

struct ForwardResult {
  Tensor input;  // projected features, N x hidden
  std::vector<LayerOutput> layers;
};

class Model {
 public:
  Model() = default;
  Model(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::vector<LayerParams>& layers() { return layers_; }
  const std::vector<LayerParams>& layers() const { return layers_; }
  Parameter& input_weight() { return input_weight_; }
  Parameter& input_bias() { return input_bias_; }
  const Parameter& input_weight() const { return input_weight_; }
  const Parameter& input_bias() const { return input_bias_; }

  /// Every learnable parameter in a fixed order.
  std::vector<Parameter*> parameters();

  /// thresholds[l][r] for 0-based layer l.
  void set_thresholds(const std::vector<std::vector<double>>& thresholds);
  std::vector<std::vector<double>> thresholds() const;

  /// ReLU(x W + b), shared across nodes.
  Tensor input_projection(Tape& tape, const Matrix& x);

  /// One layer over every node of the graph. `layer` is 1-based.
  LayerOutput layer_forward(Tape& tape, std::size_t layer, const Tensor& prev,
                            const MultiRelationGraph& g, const ForwardContext& ctx);

  ForwardResult forward(Tape& tape, const MultiRelationGraph& g, const ForwardContext& ctx);

 private:
  ModelConfig config_;
  Parameter input_weight_;
  Parameter input_bias_;
  std::vector<LayerParams> layers_;
};

struct LossBreakdown {
  Tensor total;
  std::vector<double> cross_entropy;  // per layer
  std::vector<double> similarity;     // per layer
};

/// sum_l [CE_l + lambda_sim * L_sim_l] over the supervised rows.
/// `layer_logits` hold the batch rows only; `similarity_losses` may be empty.
LossBreakdown total_loss(std::span<const Tensor> layer_logits, std::span<const int> labels,
                         std::span<const Tensor> similarity_losses, double lambda_sim,
                         std::span<const double> class_weights);

/// Class-1 probability from the final layer of an inference-mode forward pass.
std::vector<double> predict(Model& model, const MultiRelationGraph& g,
                            std::span<const NodeId> nodes);

/// Same as predict, reusing a completed forward result.
std::vector<double> fraud_probabilities(const ForwardResult& fwd, std::span<const NodeId> nodes);

}  // namespace lcgnn
