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

#include <cstdint>
#include <span>
#include <string>

namespace lcgnn {

enum class NormMode { None, NodeWise, BatchWise };

NormMode parse_norm_mode(const std::string& s);
std::string to_string(NormMode m);

struct NormConfig {
  NormMode mode = NormMode::None;
  double eps = 1e-2;
  /// Weight kept on the old running statistic at each training update.
  double momentum = 0.9;
};

/// Per-feature statistics used by batch-wise normalization at inference time.
struct RunningStats {
  Matrix mean;  // 1 x d
  Matrix var;   // 1 x d

  static RunningStats identity(Eigen::Index d);
};

/// Node-wise partial neighborhood normalization.
///
/// Row j of `message_sums` holds S_j = sum_r p_r * sum_{v selected under r} h_v, and
/// `n_selected[j]` the number of selected neighbors of center j over all relations.
/// With d features:
///   mu_j     = sum_i S_ji / (d * n_j)
///   sigma2_j = sum_i (S_ji - mu_j)^2 / (d * n_j)
///   out_j    = (h_j - mu_j) / sqrt(sigma2_j + eps)
/// Rows with n_j == 0 pass through unchanged.
Tensor node_wise_normalize(const Tensor& h, const Tensor& message_sums,
                           std::span<const double> n_selected, double eps);

/// Batch-wise partial neighborhood normalization, without scale or shift.
///
/// Over the m statistics rows (n_j >= 1 and, if `stats_rows` is non-empty, flagged there):
///   mu_i     = (1/m) sum_j S_ji / n_j
///   sigma2_i = (1/m) sum_j (S_ji - mu_i)^2 / n_j
///   out_ji   = (h_ji - mu_i) / sqrt(sigma2_i + eps)
/// Every row with n_j >= 1 is normalized with these statistics; rows with n_j == 0
/// pass through. In training mode `running` is blended toward the batch statistics;
/// otherwise the running statistics replace them.
Tensor batch_wise_normalize(const Tensor& h, const Tensor& message_sums,
                            std::span<const double> n_selected,
                            std::span<const std::uint8_t> stats_rows, bool training,
                            const NormConfig& cfg, RunningStats& running);

}  // namespace lcgnn
