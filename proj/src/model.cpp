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
#include "lcgnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lcgnn {

namespace {

Matrix xavier(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  return w;
}

Matrix zeros(std::size_t rows, std::size_t cols) {
  return Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

struct Entry {
  std::size_t node;
  double mean_weight;
  double sum_weight;
};

}  // namespace

void ModelConfig::validate() const {
  if (input_dim == 0) throw std::invalid_argument("model: input_dim must be >= 1");
  if (num_relations == 0) throw std::invalid_argument("model: need at least one relation");
  if (num_layers == 0) throw std::invalid_argument("model: num_layers must be >= 1");
  if (hidden_dim == 0) throw std::invalid_argument("model: hidden_dim must be >= 1");
  if (similarity_dim == 0) throw std::invalid_argument("model: similarity_dim must be >= 1");
  if (iis_start_layer < 1 || iis_start_layer > num_layers + 1) {
    throw std::invalid_argument("model: iis_start_layer must lie in [1, num_layers + 1]");
  }
  if (!(initial_threshold > 0.0 && initial_threshold <= 1.0)) {
    throw std::invalid_argument("model: initial threshold must lie in (0, 1]");
  }
  if (!(class_weights[0] > 0.0 && class_weights[1] > 0.0)) {
    throw std::invalid_argument("model: class weights must be positive");
  }
  if (!(norm.eps > 0.0)) throw std::invalid_argument("model: norm eps must be positive");
  if (lambda_sim < 0.0) throw std::invalid_argument("model: lambda_sim must be >= 0");
}

Model::Model(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(seed);
  const std::size_t h = config_.hidden_dim;
  input_weight_ = Parameter("input.w", xavier(config_.input_dim, h, rng));
  input_bias_ = Parameter("input.b", zeros(1, h));
  layers_.reserve(config_.num_layers);
  for (std::size_t l = 1; l <= config_.num_layers; ++l) {
    const std::string name = "layer" + std::to_string(l);
    LayerParams p;
    p.similarity = make_similarity_module(config_.similarity, h, config_.similarity_dim, rng, name);
    p.update_weight = Parameter(name + ".update_w", xavier(2 * h, h, rng));
    p.update_bias = Parameter(name + ".update_b", zeros(1, h));
    p.classifier_weight = Parameter(name + ".cls_w", xavier(h, 2, rng));
    p.classifier_bias = Parameter(name + ".cls_b", zeros(1, 2));
    p.thresholds.assign(config_.num_relations, config_.initial_threshold);
    p.running = RunningStats::identity(static_cast<Eigen::Index>(h));
    layers_.push_back(std::move(p));
  }
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out{&input_weight_, &input_bias_};
  for (auto& p : layers_) {
    out.insert(out.end(), {&p.similarity.weight, &p.similarity.bias, &p.update_weight,
                           &p.update_bias, &p.classifier_weight, &p.classifier_bias});
  }
  return out;
}

void Model::set_thresholds(const std::vector<std::vector<double>>& thresholds) {
  if (thresholds.size() != layers_.size()) throw std::invalid_argument("thresholds: layer count");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (thresholds[l].size() != config_.num_relations) {
      throw std::invalid_argument("thresholds: relation count");
    }
    for (double p : thresholds[l]) {
      if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("thresholds must lie in (0, 1]");
    }
    layers_[l].thresholds = thresholds[l];
  }
}

std::vector<std::vector<double>> Model::thresholds() const {
  std::vector<std::vector<double>> out;
  for (const auto& p : layers_) out.push_back(p.thresholds);
  return out;
}

Tensor Model::input_projection(Tape& tape, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != config_.input_dim) {
    throw ShapeError("input_projection: features have " + std::to_string(x.cols()) +
                     " columns, model expects " + std::to_string(config_.input_dim));
  }
  return relu(add(matmul(tape.constant(x), tape.parameter(input_weight_)),
                  tape.parameter(input_bias_)));
}

LayerOutput Model::layer_forward(Tape& tape, std::size_t layer, const Tensor& prev,
                                 const MultiRelationGraph& g, const ForwardContext& ctx) {
  if (layer < 1 || layer > layers_.size()) throw std::out_of_range("layer index out of range");
  if (g.num_relations() != config_.num_relations) {
    throw ShapeError("layer_forward: graph relation count does not match the model");
  }
  const std::size_t n = g.num_nodes();
  if (static_cast<std::size_t>(prev.rows()) != n ||
      static_cast<std::size_t>(prev.cols()) != config_.hidden_dim) {
    throw ShapeError("layer_forward: previous embeddings must be num_nodes x hidden");
  }
  LayerParams& params = layers_[layer - 1];
  const std::size_t num_rel = g.num_relations();

  LayerOutput out;
  LayerSelection& sel = out.selection;
  sel.layer = layer;
  sel.scope = layer >= config_.iis_start_layer ? CandidateScope::TwoHop : CandidateScope::OneHop;
  sel.by_relation.assign(num_rel, std::vector<NeighborSelection>(n));
  sel.n_selected.assign(n, 0.0);

  // Rows are unit-normalized once so each cosine distance is a single dot product.
  Matrix z = embed(params.similarity, prev.value());
  const bool cosine = config_.similarity == SimilarityMode::Cosine;
  std::vector<std::uint8_t> degenerate(n, 0);
  if (cosine) {
    for (std::size_t u = 0; u < n; ++u) {
      const double norm = z.row(static_cast<Eigen::Index>(u)).norm();
      if (norm == 0.0) {
        degenerate[u] = 1;
      } else {
        z.row(static_cast<Eigen::Index>(u)) /= norm;
      }
    }
  }
  const auto dim = static_cast<std::size_t>(z.cols());
  const auto distance = [&](std::size_t u, std::size_t v) {
    const double* a = z.data() + u * dim;
    const double* b = z.data() + v * dim;
    double acc = 0.0;
    if (cosine) {
      if (degenerate[u] || degenerate[v]) return 1.0;
      for (std::size_t i = 0; i < dim; ++i) acc += a[i] * b[i];
      return 1.0 - std::clamp(acc, -1.0, 1.0);
    }
    for (std::size_t i = 0; i < dim; ++i) acc += std::abs(a[i] - b[i]);
    return acc / static_cast<double>(dim);
  };

  RowCombination mean_pattern, sum_pattern;
  std::vector<Entry> entries;
  for (NodeId u = 0; u < n; ++u) {
    entries.clear();
    for (std::size_t r = 0; r < num_rel; ++r) {
      const auto nb = sel.scope == CandidateScope::OneHop ? g.neighbors(u, r)
                                                          : g.two_hop_neighbors(u, r);
      std::vector<NodeId> cands(nb.begin(), nb.end());
      std::vector<double> dist(cands.size());
      for (std::size_t k = 0; k < cands.size(); ++k) {
        dist[k] = distance(u, cands[k]);
      }
      const double p_r = params.thresholds[r];
      NeighborSelection& s = sel.by_relation[r][u];
      s = select_by_distance(u, r, std::move(cands), std::move(dist), p_r);
      if (s.kept.empty()) continue;
      const double w_mean = p_r / static_cast<double>(s.kept.size());
      for (NodeId v : s.kept) entries.push_back({v, w_mean, p_r});
      sel.n_selected[u] += static_cast<double>(s.kept.size());
    }
    // Fixed summation order (by node id) keeps the layer independent of neighbor order.
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.node < b.node; });
    for (std::size_t k = 0; k < entries.size();) {
      Entry merged = entries[k];
      for (++k; k < entries.size() && entries[k].node == merged.node; ++k) {
        merged.mean_weight += entries[k].mean_weight;
        merged.sum_weight += entries[k].sum_weight;
      }
      mean_pattern.indices.push_back(merged.node);
      mean_pattern.weights.push_back(merged.mean_weight);
      sum_pattern.indices.push_back(merged.node);
      sum_pattern.weights.push_back(merged.sum_weight);
    }
    mean_pattern.offsets.push_back(mean_pattern.indices.size());
    sum_pattern.offsets.push_back(sum_pattern.indices.size());
  }

  Tensor combined = combine_rows(prev, mean_pattern);
  Tensor updated = relu(add(matmul(concat_rows(prev, combined), tape.parameter(params.update_weight)),
                            tape.parameter(params.update_bias)));

  if (config_.norm.mode != NormMode::None) {
    // Statistics come from the selected neighbors' states at this layer.
    Tensor sums = combine_rows(updated, sum_pattern);
    if (config_.norm.mode == NormMode::NodeWise) {
      updated = node_wise_normalize(updated, sums, sel.n_selected, config_.norm.eps);
    } else {
      std::vector<std::uint8_t> stats_rows;
      if (!ctx.batch.empty()) {
        stats_rows.assign(n, 0);
        for (NodeId u : ctx.batch) stats_rows.at(u) = 1;
      }
      updated = batch_wise_normalize(updated, sums, sel.n_selected, stats_rows, ctx.training,
                                     config_.norm, params.running);
    }
  }

  // Centers without any selected neighbor keep their previous embedding.
  std::vector<double> active(n);
  for (std::size_t u = 0; u < n; ++u) active[u] = sel.n_selected[u] > 0.0 ? 1.0 : 0.0;
  out.embeddings = add(prev, scale_rows(updated, active));
  out.logits = add(matmul(out.embeddings, tape.parameter(params.classifier_weight)),
                   tape.parameter(params.classifier_bias));

  if (ctx.training) {
    if (ctx.rng == nullptr || ctx.labeled.size() != n) {
      throw std::invalid_argument("layer_forward: training needs an rng and a labeled mask");
    }
    const auto& labels = g.labels();
    std::vector<SimilarityPair> pairs;
    std::vector<NodeId> pool, same, diff;
    for (NodeId u : ctx.batch) {
      pool.clear();
      for (std::size_t r = 0; r < num_rel; ++r) {
        for (NodeId v : sel.by_relation[r][u].candidates) {
          if (ctx.labeled[v]) pool.push_back(v);
        }
      }
      std::sort(pool.begin(), pool.end());
      pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
      same.clear();
      diff.clear();
      for (NodeId v : pool) (labels[v] == labels[u] ? same : diff).push_back(v);
      for (auto* group : {&same, &diff}) {
        std::shuffle(group->begin(), group->end(), *ctx.rng);
        const std::size_t take = std::min(group->size(), config_.pairs_per_class);
        for (std::size_t k = 0; k < take; ++k) {
          pairs.push_back({u, (*group)[k], group == &same});
        }
      }
    }
    out.similarity_loss =
        similarity_loss(tape, params.similarity, prev, pairs, config_.similarity_margin);
  }
  return out;
}

ForwardResult Model::forward(Tape& tape, const MultiRelationGraph& g, const ForwardContext& ctx) {
  ForwardResult res;
  res.input = input_projection(tape, g.features());
  Tensor h = res.input;
  for (std::size_t l = 1; l <= layers_.size(); ++l) {
    res.layers.push_back(layer_forward(tape, l, h, g, ctx));
    h = res.layers.back().embeddings;
  }
  return res;
}

LossBreakdown total_loss(std::span<const Tensor> layer_logits, std::span<const int> labels,
                         std::span<const Tensor> similarity_losses, double lambda_sim,
                         std::span<const double> class_weights) {
  if (layer_logits.empty()) throw std::invalid_argument("total_loss: no layers");
  if (!similarity_losses.empty() && similarity_losses.size() != layer_logits.size()) {
    throw std::invalid_argument("total_loss: one similarity loss per layer expected");
  }
  LossBreakdown out;
  for (std::size_t l = 0; l < layer_logits.size(); ++l) {
    Tensor term = softmax_cross_entropy(layer_logits[l], labels, class_weights);
    out.cross_entropy.push_back(term.scalar());
    if (!similarity_losses.empty()) {
      out.similarity.push_back(similarity_losses[l].scalar());
      if (lambda_sim != 0.0) term = add(term, scale(similarity_losses[l], lambda_sim));
    }
    out.total = l == 0 ? term : add(out.total, term);
  }
  return out;
}

std::vector<double> fraud_probabilities(const ForwardResult& fwd, std::span<const NodeId> nodes) {
  const Matrix& logits = fwd.layers.back().logits.value();
  std::vector<double> out;
  out.reserve(nodes.size());
  for (NodeId u : nodes) {
    if (static_cast<Eigen::Index>(u) >= logits.rows()) {
      throw std::out_of_range("unknown node id " + std::to_string(u));
    }
    const double d = logits(u, 0) - logits(u, 1);
    // softmax class-1 probability = 1 / (1 + exp(z0 - z1))
    out.push_back(1.0 / (1.0 + std::exp(d)));
  }
  return out;
}

std::vector<double> predict(Model& model, const MultiRelationGraph& g,
                            std::span<const NodeId> nodes) {
  for (NodeId u : nodes) {
    if (u >= g.num_nodes()) throw std::out_of_range("unknown node id " + std::to_string(u));
  }
  Tape tape(false);
  ForwardContext ctx;
  const ForwardResult fwd = model.forward(tape, g, ctx);
  return fraud_probabilities(fwd, nodes);
}

}  // namespace lcgnn
