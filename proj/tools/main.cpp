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

#include "lcgnn/tensor.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>

namespace {

using namespace lcgnn;

std::string kebab(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

/// One string option per config key; values are applied after the config file.
struct KeyFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::vector<std::string>& keys) {
    for (const auto& k : keys) options[k] = app->add_option("--" + kebab(k), values[k]);
  }

  std::map<std::string, std::string> given() const {
    std::map<std::string, std::string> out;
    for (const auto& [k, opt] : options) {
      if (opt->count() > 0) out[k] = values.at(k);
    }
    return out;
  }
};

std::map<std::string, std::string> merged(const std::string& config_file, const KeyFlags& flags) {
  std::map<std::string, std::string> kv;
  if (!config_file.empty()) kv = read_key_value_file(config_file);
  if (const char* env = std::getenv(cli::kOutputDirEnv); env && *env) kv["output_dir"] = env;
  for (const auto& [k, v] : flags.given()) kv[k] = v;
  return kv;
}

RunConfig build_run_config(const std::string& config_file, const KeyFlags& flags) {
  RunConfig cfg;
  for (const auto& [k, v] : merged(config_file, flags)) apply_run_setting(cfg, k, v);
  return cfg;
}

GenerateConfig build_generate_config(const std::string& config_file, const KeyFlags& flags) {
  GenerateConfig cfg;
  auto kv = merged(config_file, flags);
  if (auto it = kv.find("preset"); it != kv.end()) {
    apply_generate_setting(cfg, it->first, it->second);
    kv.erase(it);
  }
  for (const auto& [k, v] : kv) apply_generate_setting(cfg, k, v);
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Layered camouflage-resistant GNN for multi-relation fraud detection"};
  app.require_subcommand(1);

  std::string config_file;

  auto* gen = app.add_subcommand("generate", "Generate a synthetic fraud graph");
  KeyFlags gen_flags;
  gen->add_option("--config", config_file, "key = value config file");
  gen_flags.add(gen, generate_config_keys());

  auto* train = app.add_subcommand("train", "Train a model and write checkpoint and CSV logs");
  KeyFlags train_flags;
  bool quiet = false;
  train->add_option("--config", config_file, "key = value config file");
  train->add_flag("--quiet", quiet, "Suppress per-epoch progress");
  train_flags.add(train, run_config_keys());

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  std::string ckpt, dataset, split = "test", output;
  eval->add_option("--checkpoint", ckpt, "Checkpoint written by train")->required();
  eval->add_option("--dataset", dataset, "Dataset directory")->required();
  eval->add_option("--split", split, "train, test or all")->capture_default_str();
  eval->add_option("--output-dir", output, "Directory for eval_report.txt");

  auto* ablate = app.add_subcommand("ablate", "Run the four-stage component ladder");
  KeyFlags ablate_flags;
  std::size_t seeds = 5;
  ablate->add_option("--config", config_file, "key = value config file");
  ablate->add_option("--seeds", seeds, "Seeds per stage, counting up from seed")
      ->capture_default_str();
  ablate_flags.add(ablate, run_config_keys());

  auto* stats = app.add_subcommand("stats", "Print per-relation degree statistics");
  stats->add_option("--dataset", dataset, "Dataset directory")->required();
  stats->add_option("--output-dir", output, "Directory for stats.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const char* env = std::getenv(cli::kOutputDirEnv);
  if (gen->parsed()) {
    cli::cmd_generate(build_generate_config(config_file, gen_flags), std::cout);
  } else if (train->parsed()) {
    cli::cmd_train(build_run_config(config_file, train_flags), std::cout, !quiet);
  } else if (eval->parsed()) {
    if (env && *env && output.empty()) output = env;
    cli::cmd_eval(ckpt, dataset, cli::parse_eval_split(split), output, std::cout);
  } else if (ablate->parsed()) {
    const auto rows = cli::cmd_ablate(build_run_config(config_file, ablate_flags), seeds, std::cerr);
    std::cout << cli::ablation_csv(rows);
  } else if (stats->parsed()) {
    if (env && *env && output.empty()) output = env;
    cli::cmd_stats(dataset, output, std::cout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lcgnn::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const lcgnn::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
