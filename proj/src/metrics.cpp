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
#include "lcgnn/metrics.hpp"

#include "lcgnn/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lcgnn {

namespace {

void check_aligned(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("metrics: " + std::to_string(a) + " labels vs " +
                                std::to_string(b) + " predictions");
  }
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp + fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

}  // namespace

Confusion confusion(std::span<const std::uint8_t> labels,
                    std::span<const std::uint8_t> predictions) {
  check_aligned(labels.size(), predictions.size());
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool y = labels[i] != 0, p = predictions[i] != 0;
    if (y && p) ++c.tp;
    else if (!y && p) ++c.fp;
    else if (!y && !p) ++c.tn;
    else ++c.fn;
  }
  return c;
}

double recall(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions) {
  const Confusion c = confusion(labels, predictions);
  return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double precision(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions) {
  const Confusion c = confusion(labels, predictions);
  return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double macro_f1(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions) {
  const Confusion c = confusion(labels, predictions);
  // F1 = 2PR/(P+R) = 2TP/(2TP+FP+FN); the benign class swaps roles.
  return 0.5 * (f1(c.tp, c.fp, c.fn) + f1(c.tn, c.fn, c.fp));
}

double auc(std::span<const std::uint8_t> labels, std::span<const double> scores) {
  check_aligned(labels.size(), scores.size());
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        pos_rank_sum += avg_rank;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("auc: both classes must be present");
  const double p = static_cast<double>(pos), q = static_cast<double>(neg);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

std::vector<std::uint8_t> threshold_predictions(std::span<const double> probabilities) {
  std::vector<std::uint8_t> out(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) out[i] = probabilities[i] > 0.5 ? 1 : 0;
  return out;
}

EvalReport evaluate_scores(std::span<const std::uint8_t> labels,
                           std::span<const double> probabilities) {
  check_aligned(labels.size(), probabilities.size());
  const auto preds = threshold_predictions(probabilities);
  EvalReport r;
  r.confusion = confusion(labels, preds);
  r.recall_undefined = r.confusion.tp + r.confusion.fn == 0;
  r.recall = recall(labels, preds);
  r.precision = precision(labels, preds);
  r.macro_f1 = macro_f1(labels, preds);
  r.auc = auc(labels, probabilities);
  return r;
}

std::string to_key_value(const EvalReport& r) {
  std::string s;
  s += "recall=" + format_real(r.recall) + "\n";
  s += "precision=" + format_real(r.precision) + "\n";
  s += "macro_f1=" + format_real(r.macro_f1) + "\n";
  s += "auc=" + format_real(r.auc) + "\n";
  s += "tp=" + std::to_string(r.confusion.tp) + "\n";
  s += "fp=" + std::to_string(r.confusion.fp) + "\n";
  s += "tn=" + std::to_string(r.confusion.tn) + "\n";
  s += "fn=" + std::to_string(r.confusion.fn) + "\n";
  return s;
}

std::string report_csv_header() { return "recall,precision,macro_f1,auc,tp,fp,tn,fn"; }

std::string report_csv_row(const EvalReport& r) {
  return format_real(r.recall) + "," + format_real(r.precision) + "," + format_real(r.macro_f1) +
         "," + format_real(r.auc) + "," + std::to_string(r.confusion.tp) + "," +
         std::to_string(r.confusion.fp) + "," + std::to_string(r.confusion.tn) + "," +
         std::to_string(r.confusion.fn);
}

}  // namespace lcgnn
