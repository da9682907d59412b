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
#include "lcgnn/tensor.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace lcgnn {

enum class SimilarityMode { L1, Cosine };

SimilarityMode parse_similarity_mode(const std::string& s);
std::string to_string(SimilarityMode m);

/// Per-layer neighbor similarity measure. Cosine mode embeds with tanh(h W + b) into
/// `embed_dim` dimensions; L1 mode maps to 2 class scores with softmax.
struct SimilarityModule {
  SimilarityMode mode = SimilarityMode::Cosine;
  Parameter weight;  // input_dim x embed_dim
  Parameter bias;    // 1 x embed_dim

  std::size_t input_dim() const { return static_cast<std::size_t>(weight.value.rows()); }
  std::size_t embed_dim() const { return static_cast<std::size_t>(weight.value.cols()); }
};

SimilarityModule make_similarity_module(SimilarityMode mode, std::size_t input_dim,
                                        std::size_t cosine_dim, std::mt19937_64& rng,
                                        const std::string& name);

/// Row-wise embedding of `h` (values only, no tape).
Matrix embed(const SimilarityModule& m, const Matrix& h);
/// Row-wise embedding recorded on the tape of `h`.
Tensor embed(Tape& tape, SimilarityModule& m, const Tensor& h);

struct CosineResult {
  double distance = 1.0;
  bool degenerate = false;  // a zero-norm embedding; distance fixed to 1
};

/// 1 - cos(a, b) of two already-embedded vectors; in [0, 2].
CosineResult cosine_distance_embedded(std::span<const double> a, std::span<const double> b);
/// Mean absolute difference of two already-embedded vectors.
double l1_distance_embedded(std::span<const double> a, std::span<const double> b);
/// Dispatches on the module mode over embedded rows.
double embedded_distance(SimilarityMode mode, std::span<const double> a,
                         std::span<const double> b);

/// Cosine distance between the module embeddings of h_u and h_v.
CosineResult cosine_distance(const SimilarityModule& m, std::span<const double> h_u,
                             std::span<const double> h_v);
/// Mean absolute difference between the 2-class softmax scores of h_u and h_v; in [0, 1].
double l1_distance(const SimilarityModule& m, std::span<const double> h_u,
                   std::span<const double> h_v);

/// Differentiable distances between rows of `a` and `b` under the module (m x 1).
Tensor pair_distances(Tape& tape, SimilarityModule& m, const Tensor& a, const Tensor& b);

struct NeighborSelection {
  NodeId center = 0;
  std::size_t relation = 0;
  std::vector<NodeId> candidates;
  std::vector<double> distances;  // aligned with candidates
  std::vector<NodeId> kept;       // ascending distance, ties by node id
  std::vector<double> kept_distances;
  double threshold = 1.0;
};

/// Number of candidates kept at threshold p: max(1, ceil(p * n)) for n >= 1, else 0.
std::size_t keep_count(double p, std::size_t n);

/// Keeps the keep_count(p, n) nearest candidates. Throws std::invalid_argument for p
/// outside (0, 1] or misaligned inputs.
NeighborSelection select_by_distance(NodeId center, std::size_t relation,
                                     std::vector<NodeId> candidates,
                                     std::vector<double> distances, double p);

/// Embeds the center and candidate features with `m`, then selects as above.
/// `candidate_feats` has one row per candidate.
NeighborSelection select_neighbors(const SimilarityModule& m, std::span<const double> center_feat,
                                   const Matrix& candidate_feats,
                                   std::span<const NodeId> candidates, double p,
                                   NodeId center = 0, std::size_t relation = 0);

struct SimilarityPair {
  std::size_t center_row;
  std::size_t neighbor_row;
  bool same_label;
};

inline constexpr double kSimilarityMargin = 0.5;

/// Contrastive label-aware loss over pairs of rows of `h`:
/// mean [same * D + (1 - same) * max(0, margin - D)]. Empty pair set -> 0.
Tensor similarity_loss(Tape& tape, SimilarityModule& m, const Tensor& h,
                       std::span<const SimilarityPair> pairs, double margin = kSimilarityMargin);

}  // namespace lcgnn
