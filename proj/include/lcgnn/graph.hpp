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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lcgnn {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Malformed dataset input; the message carries "file:line: reason".
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One relation's undirected adjacency in CSR form.
struct Csr {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> indices;

  std::size_t degree(NodeId u) const { return offsets[u + 1] - offsets[u]; }
};

struct RelationStats {
  double mean_degree = 0.0;
  std::size_t max_degree = 0;
  std::size_t edges = 0;  // undirected edge count
};

struct DegreeStats {
  std::vector<RelationStats> relations;
  /// Undirected edges over all relations divided by R * n(n-1)/2.
  double density = 0.0;
};

/// A heterogeneous graph stored as R homogeneous relation subgraphs over one node set.
/// Immutable after construction.
class MultiRelationGraph {
 public:
  MultiRelationGraph() = default;

  /// Builds the graph from raw edge lists. Edges are symmetrized, duplicates are
  /// merged and self-loops dropped.
  MultiRelationGraph(Matrix features, std::vector<std::uint8_t> labels,
                     const std::vector<std::vector<Edge>>& relation_edges);

  std::size_t num_nodes() const { return labels_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features_.cols()); }

  const Matrix& features() const { return features_; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  const Csr& relation(std::size_t r) const { return relations_.at(r); }

  /// Sorted, duplicate-free neighbors of `u` under relation `r` (0-based).
  std::span<const NodeId> neighbors(NodeId u, std::size_t r) const;

  /// Same-relation neighbors and neighbors-of-neighbors of `u`, excluding `u`, sorted.
  std::vector<NodeId> two_hop_candidates(NodeId u, std::size_t r) const;

  /// Same set as two_hop_candidates, served from a per-relation table built on first use.
  std::span<const NodeId> two_hop_neighbors(NodeId u, std::size_t r) const;

  /// Throws std::logic_error naming the first violated invariant.
  void validate() const;

  friend bool operator==(const MultiRelationGraph& a, const MultiRelationGraph& b);

 private:
  void check_ids(NodeId u, std::size_t r) const;

  Matrix features_;
  std::vector<std::uint8_t> labels_;
  std::vector<Csr> relations_;

  struct TwoHopCache {
    std::mutex mutex;
    std::vector<std::unique_ptr<Csr>> tables;
  };
  // Shared by copies; the graph itself never changes after construction.
  std::shared_ptr<TwoHopCache> two_hop_ = std::make_shared<TwoHopCache>();
};

DegreeStats degree_stats(const MultiRelationGraph& g);

/// Reads meta.tsv, features.tsv, labels.tsv and edges_r<k>.tsv (k = 1..R).
MultiRelationGraph load_graph(const std::filesystem::path& dir);

/// Writes the directory format read by load_graph. Each undirected edge is written
/// once as "u<TAB>v" with u < v; reals use shortest round-trip decimal text.
void save_graph(const MultiRelationGraph& g, const std::filesystem::path& dir);

/// Formats a double as the shortest decimal text that parses back bit-exactly.
std::string format_real(double x);

}  // namespace lcgnn
