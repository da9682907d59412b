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

// Random instance generators shared by unit and acceptance tests.

#include "gradcheck.hpp"
#include "oracles.hpp"

#include "lcgnn/model.hpp"

#include <random>
#include <vector>

namespace lcgnn::testing {

/// Random selected-neighbor messages for `m` centers with their sums S and counts n.
struct MessageInstance {
  std::vector<CenterMessages> centers;
  std::vector<double> p;
  Matrix h, sums;
  std::vector<double> n;
};

inline MessageInstance random_messages(std::mt19937_64& rng, std::size_t m, std::size_t d,
                                       std::size_t R, int max_per_relation = 3) {
  MessageInstance in;
  std::uniform_real_distribution<double> up(0.05, 1.0);
  std::uniform_int_distribution<int> cnt(0, max_per_relation);
  std::normal_distribution<double> g(0.0, 1.5);
  for (std::size_t r = 0; r < R; ++r) in.p.push_back(up(rng));
  in.h = random_matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d), rng);
  in.sums = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < m; ++j) {
    CenterMessages c;
    c.by_relation.resize(R);
    for (std::size_t r = 0; r < R; ++r) {
      const int k = cnt(rng);
      for (int t = 0; t < k; ++t) {
        std::vector<double> hv(d);
        for (auto& x : hv) x = std::max(0.0, g(rng));
        for (std::size_t i = 0; i < d; ++i) {
          in.sums(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += in.p[r] * hv[i];
        }
        c.by_relation[r].push_back(std::move(hv));
      }
    }
    in.n.push_back(selected_count(c));
    in.centers.push_back(std::move(c));
  }
  return in;
}

/// Random graph together with its dense adjacency per relation.
struct GraphFixture {
  MultiRelationGraph g;
  std::vector<Dense> adjacency;
};

inline GraphFixture random_fixture(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                  std::size_t R, std::size_t edges) {
  std::vector<std::vector<Edge>> rel;
  GraphFixture f;
  for (std::size_t r = 0; r < R; ++r) {
    rel.push_back(random_edges(n, edges, rng));
    f.adjacency.push_back(dense_adjacency(n, rel.back()));
  }
  std::vector<std::uint8_t> labels(n);
  for (std::size_t u = 0; u < n; ++u) labels[u] = u % 3 == 0;
  f.g = MultiRelationGraph(random_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d), rng),
                           std::move(labels), rel);
  return f;
}

inline ModelConfig small_config(const MultiRelationGraph& g, SimilarityMode sim, NormMode norm) {
  ModelConfig c;
  c.input_dim = g.feature_dim();
  c.num_relations = g.num_relations();
  c.num_layers = 6;
  c.hidden_dim = 5;
  c.similarity = sim;
  c.norm.mode = norm;
  c.iis_start_layer = 4;
  return c;
}

inline void randomize_thresholds(Model& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  auto t = m.thresholds();
  for (auto& row : t) {
    for (auto& p : row) p = u(rng);
  }
  m.set_thresholds(t);
}

}  // namespace lcgnn::testing
