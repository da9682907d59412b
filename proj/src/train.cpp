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
#include "lcgnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lcgnn {

void TrainConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  if (!(adam.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

Split stratified_split(std::span<const std::uint8_t> labels, double train_fraction,
                       std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  Split s;
  for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
    std::vector<NodeId> members;
    for (std::size_t u = 0; u < labels.size(); ++u) {
      if (labels[u] == cls) members.push_back(static_cast<NodeId>(u));
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto k = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    s.train.insert(s.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    s.test.insert(s.test.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Split run_split(std::span<const std::uint8_t> labels, double train_fraction, std::uint64_t seed) {
  return stratified_split(labels, train_fraction, seed ^ 0x9e3779b97f4a7c15ULL);
}

std::vector<double> selection_label_agreement(const ForwardResult& fwd,
                                              const MultiRelationGraph& g,
                                              std::span<const NodeId> centers,
                                              std::span<const std::uint8_t> labeled) {
  const auto& labels = g.labels();
  std::vector<double> out;
  for (const auto& layer : fwd.layers) {
    std::size_t agree = 0, total = 0;
    for (const auto& rel : layer.selection.by_relation) {
      for (NodeId u : centers) {
        for (NodeId v : rel[u].kept) {
          if (!labeled.empty() && !labeled[v]) continue;
          ++total;
          agree += labels[v] == labels[u];
        }
      }
    }
    out.push_back(total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total));
  }
  return out;
}

EvalReport evaluate(Model& model, const MultiRelationGraph& g, std::span<const NodeId> nodes) {
  const auto probs = predict(model, g, nodes);
  std::vector<std::uint8_t> y;
  y.reserve(nodes.size());
  for (NodeId u : nodes) y.push_back(g.labels()[u]);
  return evaluate_scores(y, probs);
}

TrainResult train_model(const MultiRelationGraph& g, const TrainConfig& cfg_in,
                        const EpochCallback& on_epoch) {
  cfg_in.validate();
  TrainConfig cfg = cfg_in;
  cfg.model.input_dim = g.feature_dim();
  cfg.model.num_relations = g.num_relations();

  TrainResult res;
  res.split = run_split(g.labels(), cfg.train_fraction, cfg.seed);
  if (res.split.train.empty()) throw std::invalid_argument("training split is empty");

  if (!cfg.fixed_class_weights) {
    std::size_t fraud = 0;
    for (NodeId u : res.split.train) fraud += g.labels()[u];
    const std::size_t benign = res.split.train.size() - fraud;
    cfg.model.class_weights = {1.0, fraud == 0 || benign == 0
                                        ? 1.0
                                        : static_cast<double>(benign) / static_cast<double>(fraud)};
  }

  res.model = Model(cfg.model, cfg.seed);
  Model& model = res.model;
  const std::size_t num_layers = cfg.model.num_layers, num_rel = g.num_relations();
  ThresholdController controller(num_layers, num_rel,
                                 ThresholdConfig{cfg.model.initial_threshold, cfg.thresholds.step,
                                                 cfg.thresholds.window, cfg.thresholds.freeze_sum});
  model.set_thresholds(controller.thresholds());

  std::vector<Parameter*> params = model.parameters();
  AdamState adam = make_adam_state(params, cfg.adam);

  std::vector<std::uint8_t> labeled(g.num_nodes(), 0);
  for (NodeId u : res.split.train) labeled[u] = 1;

  std::mt19937_64 shuffle_rng(cfg.seed + 1);
  std::mt19937_64 pair_rng(cfg.seed + 2);
  std::vector<NodeId> order = res.split.train;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.thresholds = model.thresholds();
    rec.layer_loss.assign(num_layers, 0.0);
    rec.layer_similarity.assign(num_layers, 0.0);
    rec.label_agreement.assign(num_layers, 0.0);
    std::vector<std::vector<double>> dist_sum(num_layers, std::vector<double>(num_rel, 0.0));
    std::vector<std::vector<std::size_t>> dist_count(num_layers,
                                                     std::vector<std::size_t>(num_rel, 0));

    std::shuffle(order.begin(), order.end(), shuffle_rng);
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::vector<NodeId> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                order.begin() + static_cast<std::ptrdiff_t>(stop));
      std::vector<std::size_t> rows(batch.begin(), batch.end());
      std::vector<int> y;
      y.reserve(batch.size());
      for (NodeId u : batch) y.push_back(g.labels()[u]);

      for (Parameter* p : params) p->zero_grad();
      Tape tape;
      ForwardContext ctx;
      ctx.training = true;
      ctx.batch = batch;
      ctx.labeled = labeled;
      ctx.rng = &pair_rng;
      const ForwardResult fwd = model.forward(tape, g, ctx);

      std::vector<Tensor> logits, sim;
      for (const auto& layer : fwd.layers) {
        logits.push_back(gather_rows(layer.logits, rows));
        sim.push_back(layer.similarity_loss);
      }
      const LossBreakdown loss = total_loss(logits, y, sim, cfg.model.lambda_sim,
                                            cfg.model.class_weights);
      const double total = loss.total.scalar();
      if (!std::isfinite(total)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
      }
      tape.backward(loss.total);
      adam_step(params, adam);

      for (std::size_t l = 0; l < num_layers; ++l) {
        rec.layer_loss[l] += loss.cross_entropy[l];
        rec.layer_similarity[l] += loss.similarity[l];
        for (std::size_t r = 0; r < num_rel; ++r) {
          for (NodeId u : batch) {
            const auto& s = fwd.layers[l].selection.by_relation[r][u];
            for (double d : s.kept_distances) dist_sum[l][r] += d;
            dist_count[l][r] += s.kept_distances.size();
          }
        }
      }
      const auto agree = selection_label_agreement(fwd, g, batch, labeled);
      for (std::size_t l = 0; l < num_layers; ++l) rec.label_agreement[l] += agree[l];
      rec.total_loss += total;
      ++batches;
    }

    const auto nb = static_cast<double>(batches);
    for (std::size_t l = 0; l < num_layers; ++l) {
      rec.layer_loss[l] /= nb;
      rec.layer_similarity[l] /= nb;
      rec.label_agreement[l] /= nb;
    }
    rec.total_loss /= nb;
    rec.avg_distance.assign(num_layers, std::vector<std::optional<double>>(num_rel));
    for (std::size_t l = 0; l < num_layers; ++l) {
      for (std::size_t r = 0; r < num_rel; ++r) {
        if (dist_count[l][r] > 0) {
          rec.avg_distance[l][r] = dist_sum[l][r] / static_cast<double>(dist_count[l][r]);
        }
      }
    }

    controller.observe_epoch(rec.avg_distance);
    model.set_thresholds(controller.thresholds());

    if (cfg.evaluate_each_epoch && !res.split.test.empty()) {
      rec.test = evaluate(model, g, res.split.test);
      rec.test->layer_losses = rec.layer_loss;
    }
    if (on_epoch) on_epoch(rec);
    res.history.push_back(std::move(rec));
  }
  return res;
}

}  // namespace lcgnn
