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

#include "lcgnn/synth.hpp"
#include "lcgnn/train.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lcgnn {

/// Invalid user input (config file, flag value); the CLI maps it to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses flat "key = value" text. Blank lines and lines starting with '#' are skipped.
/// Duplicate keys and lines without '=' are errors reported with `source:line`.
std::map<std::string, std::string> parse_key_values(std::string_view text,
                                                    const std::string& source);
std::map<std::string, std::string> read_key_value_file(const std::string& path);

struct RunConfig {
  std::string dataset;
  std::string output_dir = "run";
  /// sparse -> batch size 512, dense -> 256, unless batch_size is given.
  std::string preset = "sparse";
  std::optional<std::size_t> batch_size_override;
  TrainConfig train;

  std::size_t batch_size() const;
  TrainConfig resolved() const;
};

/// Keys accepted by apply_run_setting, in documentation order.
const std::vector<std::string>& run_config_keys();
/// Throws UsageError for an unknown key or an unparsable value.
void apply_run_setting(RunConfig& cfg, const std::string& key, const std::string& value);
/// Canonical "key = value" dump of every run setting.
std::string describe(const RunConfig& cfg);

struct GenerateConfig {
  SynthConfig synth;
  std::string preset = "sparse";
  std::string output_dir;
};

const std::vector<std::string>& generate_config_keys();
/// `preset` resets the synth parameters, so apply it before the other keys.
void apply_generate_setting(GenerateConfig& cfg, const std::string& key, const std::string& value);

}  // namespace lcgnn
