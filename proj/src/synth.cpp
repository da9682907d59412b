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
#include "lcgnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace lcgnn {

void SynthConfig::validate() const {
  auto prob = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (num_nodes < 2) throw std::invalid_argument("synth: need at least 2 nodes");
  if (!prob(fraud_ratio)) throw std::invalid_argument("synth: fraud_ratio outside [0, 1]");
  if (!prob(camouflage)) throw std::invalid_argument("synth: camouflage outside [0, 1]");
  if (feature_dim == 0) throw std::invalid_argument("synth: feature_dim must be >= 1");
  if (!(separation >= 0.0)) throw std::invalid_argument("synth: separation must be >= 0");
  if (mean_degree.size() != num_relations || same_label_weight.size() != num_relations) {
    throw std::invalid_argument("synth: need one degree and one q per relation");
  }
  for (std::size_t r = 0; r < num_relations; ++r) {
    if (!(mean_degree[r] >= 0.0)) throw std::invalid_argument("synth: degrees must be >= 0");
    if (mean_degree[r] > static_cast<double>(num_nodes - 1)) {
      throw std::invalid_argument("synth: degree target " + std::to_string(mean_degree[r]) +
                                  " exceeds n - 1");
    }
    if (!prob(same_label_weight[r])) throw std::invalid_argument("synth: q outside [0, 1]");
  }
}

SynthConfig synth_preset(const std::string& name) {
  SynthConfig c;
  if (name == "sparse") {
    return c;
  }
  if (name == "dense") {
    c.fraud_ratio = 0.095;
    c.feature_dim = 25;
    c.mean_degree = {38.0, 95.0, 16.0};
    c.same_label_weight = {0.8, 0.6, 0.55};
    return c;
  }
  throw std::invalid_argument("unknown preset '" + name + "' (expected sparse or dense)");
}

namespace {

std::vector<Edge> sample_relation(const std::vector<std::uint8_t>& labels, double degree, double q,
                                  std::mt19937_64& rng) {
  const std::size_t n = labels.size();
  const auto target = static_cast<std::size_t>(std::llround(degree * static_cast<double>(n) / 2.0));
  std::size_t frauds = 0;
  for (auto y : labels) frauds += y;
  const std::size_t benign = n - frauds;
  const std::size_t same_pairs = frauds * (frauds - (frauds > 0)) / 2 + benign * (benign - (benign > 0)) / 2;
  const std::size_t cross_pairs = frauds * benign;
  const std::size_t reachable = (q > 0.0 ? same_pairs : 0) + (q < 1.0 ? cross_pairs : 0);
  if (target > reachable) {
    throw std::invalid_argument("synth: degree target infeasible under the label preference");
  }

  const double top = std::max(q, 1.0 - q);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  edges.reserve(target);
  while (edges.size() < target) {
    std::size_t u = pick(rng), v = pick(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    const double accept = (labels[u] == labels[v] ? q : 1.0 - q) / top;
    if (coin(rng) >= accept) continue;
    if (!seen.insert(static_cast<std::uint64_t>(u) * n + v).second) continue;
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return edges;
}

}  // namespace

MultiRelationGraph generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = cfg.num_nodes;

  const auto frauds = static_cast<std::size_t>(std::llround(cfg.fraud_ratio * static_cast<double>(n)));
  std::vector<std::uint8_t> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(frauds), 1);
  std::shuffle(labels.begin(), labels.end(), rng);

  // Which frauds are camouflaged: the first k frauds in node order after a shuffle.
  std::vector<std::size_t> fraud_ids;
  for (std::size_t u = 0; u < n; ++u) {
    if (labels[u]) fraud_ids.push_back(u);
  }
  std::shuffle(fraud_ids.begin(), fraud_ids.end(), rng);
  const auto camouflaged =
      static_cast<std::size_t>(std::llround(cfg.camouflage * static_cast<double>(frauds)));
  std::vector<std::uint8_t> hidden(n, 0);
  for (std::size_t k = 0; k < camouflaged; ++k) hidden[fraud_ids[k]] = 1;

  const double shift = cfg.separation / std::sqrt(static_cast<double>(cfg.feature_dim));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.feature_dim));
  for (std::size_t u = 0; u < n; ++u) {
    const double mean = labels[u] && !hidden[u] ? shift : 0.0;
    for (std::size_t i = 0; i < cfg.feature_dim; ++i) {
      features(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(i)) = mean + normal(rng);
    }
  }

  std::vector<std::vector<Edge>> edges;
  for (std::size_t r = 0; r < cfg.num_relations; ++r) {
    edges.push_back(sample_relation(labels, cfg.mean_degree[r], cfg.same_label_weight[r], rng));
  }
  return MultiRelationGraph(std::move(features), std::move(labels), edges);
}

}  // namespace lcgnn
