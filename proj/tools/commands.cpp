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
#include "commands.hpp"

#include "lcgnn/checkpoint.hpp"
#include "lcgnn/synth.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace lcgnn::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

MultiRelationGraph load_dataset(const fs::path& dir) {
  if (dir.empty()) throw UsageError("no dataset given");
  if (!fs::exists(dir)) throw UsageError(dir.string() + ": dataset not found");
  return load_graph(dir);
}

}  // namespace

std::string stats_csv(const MultiRelationGraph& g) {
  const DegreeStats s = degree_stats(g);
  const double n = static_cast<double>(g.num_nodes());
  const double pairs = n * (n - 1.0) / 2.0;
  std::ostringstream os;
  os << "# lcgnn stats v1\n"
     << "relation,edges,mean_degree,max_degree,density\n";
  std::size_t total = 0;
  for (std::size_t r = 0; r < s.relations.size(); ++r) {
    const auto& rs = s.relations[r];
    total += rs.edges;
    os << r + 1 << ',' << rs.edges << ',' << format_real(rs.mean_degree) << ',' << rs.max_degree
       << ',' << format_real(pairs > 0 ? static_cast<double>(rs.edges) / pairs : 0.0) << '\n';
  }
  std::size_t max_deg = 0;
  for (const auto& rs : s.relations) max_deg = std::max(max_deg, rs.max_degree);
  os << "all," << total << ','
     << format_real(s.relations.empty() ? 0.0 : 2.0 * static_cast<double>(total) / (n * static_cast<double>(s.relations.size())))
     << ',' << max_deg << ',' << format_real(s.density) << '\n';
  return os.str();
}

std::string loss_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os << "# lcgnn loss_per_layer v1\nepoch";
  const std::size_t layers = history.empty() ? 0 : history.front().layer_loss.size();
  for (std::size_t l = 1; l <= layers; ++l) os << ",layer" << l;
  os << ",total\n";
  for (const auto& rec : history) {
    os << rec.epoch;
    for (double v : rec.layer_loss) os << ',' << format_real(v);
    os << ',' << format_real(rec.total_loss) << '\n';
  }
  return os.str();
}

std::string thresholds_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os << "# lcgnn thresholds v1\nepoch,layer,relation,threshold,avg_distance\n";
  for (const auto& rec : history) {
    for (std::size_t l = 0; l < rec.thresholds.size(); ++l) {
      for (std::size_t r = 0; r < rec.thresholds[l].size(); ++r) {
        os << rec.epoch << ',' << l + 1 << ',' << r + 1 << ',' << format_real(rec.thresholds[l][r])
           << ',';
        const auto& d = rec.avg_distance[l][r];
        if (d) os << format_real(*d);
        os << '\n';
      }
    }
  }
  return os.str();
}

std::string eval_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os << "# lcgnn eval v1\nepoch," << report_csv_header() << '\n';
  for (const auto& rec : history) {
    if (rec.test) os << rec.epoch << ',' << report_csv_row(*rec.test) << '\n';
  }
  return os.str();
}

void cmd_generate(const GenerateConfig& cfg, std::ostream& log) {
  if (cfg.output_dir.empty()) throw UsageError("generate needs an output directory");
  MultiRelationGraph g;
  try {
    g = generate(cfg.synth);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  save_graph(g, cfg.output_dir);
  write_file(fs::path(cfg.output_dir) / "stats.csv", stats_csv(g));
  log << "wrote " << g.num_nodes() << " nodes, " << g.num_relations() << " relations to "
      << cfg.output_dir << '\n';
}

void cmd_stats(const fs::path& dataset, const fs::path& output, std::ostream& out) {
  const std::string csv = stats_csv(load_dataset(dataset));
  out << csv;
  if (!output.empty()) write_file(output / "stats.csv", csv);
}

TrainResult cmd_train(const RunConfig& cfg, std::ostream& log, bool verbose) {
  const MultiRelationGraph g = load_dataset(cfg.dataset);
  TrainConfig tc = cfg.resolved();
  try {
    tc.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  write_file(out / "run_config.txt", describe(cfg));

  TrainResult res = train_model(g, tc, [&](const EpochRecord& rec) {
    if (!verbose) return;
    log << "epoch " << rec.epoch << " loss " << format_real(rec.total_loss);
    if (rec.test) {
      log << " recall " << format_real(rec.test->recall) << " auc " << format_real(rec.test->auc);
    }
    log << '\n';
  });

  write_file(out / "loss_per_layer.csv", loss_csv(res.history));
  write_file(out / "thresholds.csv", thresholds_csv(res.history));
  write_file(out / "eval.csv", eval_csv(res.history));
  save_checkpoint(Checkpoint{res.model, tc.train_fraction, tc.seed}, out / "checkpoint.tsv");
  return res;
}

EvalSplit parse_eval_split(const std::string& s) {
  if (s == "train") return EvalSplit::Train;
  if (s == "test") return EvalSplit::Test;
  if (s == "all") return EvalSplit::All;
  throw UsageError("unknown split '" + s + "' (train, test, all)");
}

EvalReport cmd_eval(const fs::path& checkpoint, const fs::path& dataset, EvalSplit split,
                    const fs::path& output, std::ostream& out) {
  const MultiRelationGraph g = load_dataset(dataset);
  if (!fs::exists(checkpoint)) throw UsageError(checkpoint.string() + ": checkpoint not found");
  Checkpoint ckpt = load_checkpoint(checkpoint);
  const ModelConfig& mc = ckpt.model.config();
  if (mc.input_dim != g.feature_dim() || mc.num_relations != g.num_relations()) {
    throw UsageError("checkpoint expects d=" + std::to_string(mc.input_dim) +
                     ", R=" + std::to_string(mc.num_relations) + " but dataset has d=" +
                     std::to_string(g.feature_dim()) + ", R=" + std::to_string(g.num_relations()));
  }
  std::vector<NodeId> nodes;
  if (split == EvalSplit::All) {
    for (std::size_t u = 0; u < g.num_nodes(); ++u) nodes.push_back(static_cast<NodeId>(u));
  } else {
    Split s = run_split(g.labels(), ckpt.train_fraction, ckpt.seed);
    nodes = split == EvalSplit::Train ? s.train : s.test;
  }
  const EvalReport report = evaluate(ckpt.model, g, nodes);
  const std::string text = to_key_value(report);
  out << text;
  if (!output.empty()) write_file(output / "eval_report.txt", text);
  return report;
}

std::vector<AblationStage> ablation_stages(const TrainConfig& base) {
  std::vector<AblationStage> stages;
  TrainConfig c = base;
  const std::size_t iis = base.model.iis_start_layer <= base.model.num_layers
                              ? base.model.iis_start_layer
                              : 4;
  c.model.similarity = SimilarityMode::L1;
  c.model.norm.mode = NormMode::None;
  c.model.iis_start_layer = c.model.num_layers + 1;
  stages.push_back({"l1", c});
  c.model.similarity = SimilarityMode::Cosine;
  stages.push_back({"cosine", c});
  c.model.norm.mode = NormMode::BatchWise;
  stages.push_back({"cosine+batchnorm", c});
  c.model.iis_start_layer = iis;
  stages.push_back({"cosine+batchnorm+iis", c});
  return stages;
}

std::vector<AblationRow> run_ablation(const MultiRelationGraph& g, const TrainConfig& base,
                                      std::size_t num_seeds, std::ostream* log) {
  std::vector<AblationRow> rows;
  const auto stages = ablation_stages(base);
  for (std::size_t s = 0; s < stages.size(); ++s) {
    for (std::size_t k = 0; k < num_seeds; ++k) {
      TrainConfig tc = stages[s].config;
      tc.seed = base.seed + k;
      tc.evaluate_each_epoch = false;
      TrainResult res = train_model(g, tc);
      AblationRow row{s + 1, stages[s].name, tc.seed, evaluate(res.model, g, res.split.test)};
      if (log) {
        *log << stages[s].name << " seed " << tc.seed << " recall " << format_real(row.report.recall)
             << " auc " << format_real(row.report.auc) << '\n';
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "# lcgnn ablation v1\nstage,name,seed," << report_csv_header() << '\n';
  for (const auto& r : rows) {
    os << r.stage << ',' << r.name << ',' << r.seed << ',' << report_csv_row(r.report) << '\n';
  }
  return os.str();
}

std::vector<AblationRow> cmd_ablate(const RunConfig& cfg, std::size_t num_seeds, std::ostream& log) {
  if (num_seeds == 0) throw UsageError("need at least one seed");
  const MultiRelationGraph g = load_dataset(cfg.dataset);
  TrainConfig tc = cfg.resolved();
  try {
    tc.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto rows = run_ablation(g, tc, num_seeds, &log);
  write_file(fs::path(cfg.output_dir) / "ablation.csv", ablation_csv(rows));
  return rows;
}

}  // namespace lcgnn::cli
