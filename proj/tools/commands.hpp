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

#include "lcgnn/config.hpp"
#include "lcgnn/graph.hpp"
#include "lcgnn/metrics.hpp"
#include "lcgnn/train.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lcgnn::cli {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "LCGNN_OUTPUT_DIR";

std::string stats_csv(const MultiRelationGraph& g);
std::string loss_csv(const std::vector<EpochRecord>& history);
std::string thresholds_csv(const std::vector<EpochRecord>& history);
std::string eval_csv(const std::vector<EpochRecord>& history);

/// Writes the dataset directory plus stats.csv inside it.
void cmd_generate(const GenerateConfig& cfg, std::ostream& log);

/// Prints stats.csv for a dataset, and writes it when `output` is non-empty.
void cmd_stats(const std::filesystem::path& dataset, const std::filesystem::path& output,
               std::ostream& out);

/// Trains and writes checkpoint.tsv, loss_per_layer.csv, thresholds.csv, eval.csv and
/// run_config.txt under cfg.output_dir.
TrainResult cmd_train(const RunConfig& cfg, std::ostream& log, bool verbose = true);

enum class EvalSplit { Train, Test, All };
EvalSplit parse_eval_split(const std::string& s);

/// Evaluates a checkpoint; writes eval_report.txt under `output` when non-empty.
EvalReport cmd_eval(const std::filesystem::path& checkpoint, const std::filesystem::path& dataset,
                    EvalSplit split, const std::filesystem::path& output, std::ostream& out);

struct AblationStage {
  std::string name;
  TrainConfig config;
};

/// l1 / no norm / 1-hop, then +cosine, +batch-wise norm, +2-hop from `iis_start`.
std::vector<AblationStage> ablation_stages(const TrainConfig& base);

struct AblationRow {
  std::size_t stage = 0;  // 1-based
  std::string name;
  std::uint64_t seed = 0;
  EvalReport report;  // held-out split after the final epoch
};

std::vector<AblationRow> run_ablation(const MultiRelationGraph& g, const TrainConfig& base,
                                      std::size_t num_seeds, std::ostream* log);
std::string ablation_csv(const std::vector<AblationRow>& rows);

/// Runs the ladder and writes ablation.csv under cfg.output_dir.
std::vector<AblationRow> cmd_ablate(const RunConfig& cfg, std::size_t num_seeds, std::ostream& log);

}  // namespace lcgnn::cli
