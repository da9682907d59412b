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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lcgnn {

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

struct EvalReport {
  double recall = 0.0;
  double precision = 0.0;
  double macro_f1 = 0.0;
  double auc = 0.5;
  Confusion confusion;
  /// Set when the evaluated set has no fraud samples; recall is then reported as 0.
  bool recall_undefined = false;
  /// Per-layer training losses, when the report belongs to a training run.
  std::vector<double> layer_losses;
};

Confusion confusion(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions);

/// Fraud-class recall TP / (TP + FN); 0 when there are no positives.
double recall(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions);
double precision(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions);
/// Unweighted mean of the benign and fraud F1 scores (a class F1 is 0 when its
/// precision + recall is 0).
double macro_f1(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions);

/// Mann-Whitney AUC: P(score_pos > score_neg) + P(tie) / 2. Throws std::invalid_argument
/// when either class is absent.
double auc(std::span<const std::uint8_t> labels, std::span<const double> scores);

/// Argmax decisions: fraud when the class-1 probability exceeds 0.5.
std::vector<std::uint8_t> threshold_predictions(std::span<const double> probabilities);

EvalReport evaluate_scores(std::span<const std::uint8_t> labels, std::span<const double> probabilities);

/// "key=value" lines for recall, precision, macro_f1, auc, tp, fp, tn, fn.
std::string to_key_value(const EvalReport& r);
std::string report_csv_header();
std::string report_csv_row(const EvalReport& r);

}  // namespace lcgnn
