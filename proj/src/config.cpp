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
#include "lcgnn/config.hpp"

#include "lcgnn/graph.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace lcgnn {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) {
    throw UsageError("invalid value '" + value + "' for " + key);
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) out.push_back(parse_number<double>(key, trim(item)));
  if (out.empty()) throw UsageError("empty list for " + key);
  return out;
}

using RunSetter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, RunSetter>>& run_setters() {
  static const std::vector<std::pair<std::string, RunSetter>> table = {
      {"dataset", [](RunConfig& c, const std::string&, const std::string& v) { c.dataset = v; }},
      {"output_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"preset", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v != "sparse" && v != "dense") throw UsageError("invalid value '" + v + "' for " + k);
         c.preset = v;
       }},
      {"train_fraction", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.train_fraction = parse_number<double>(k, v);
       }},
      {"batch_size", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.batch_size_override = parse_number<std::size_t>(k, v);
       }},
      {"epochs", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.epochs = parse_number<std::size_t>(k, v);
       }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.seed = parse_number<std::uint64_t>(k, v);
       }},
      {"similarity", [](RunConfig& c, const std::string&, const std::string& v) {
         try {
           c.train.model.similarity = parse_similarity_mode(v);
         } catch (const std::invalid_argument& e) {
           throw UsageError(e.what());
         }
       }},
      {"norm", [](RunConfig& c, const std::string&, const std::string& v) {
         try {
           c.train.model.norm.mode = parse_norm_mode(v);
         } catch (const std::invalid_argument& e) {
           throw UsageError(e.what());
         }
       }},
      {"iis_start", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.iis_start_layer = parse_number<std::size_t>(k, v);
       }},
      {"layers", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.num_layers = parse_number<std::size_t>(k, v);
       }},
      {"hidden", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.hidden_dim = parse_number<std::size_t>(k, v);
       }},
      {"sim_dim", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.similarity_dim = parse_number<std::size_t>(k, v);
       }},
      {"lambda_sim", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.lambda_sim = parse_number<double>(k, v);
       }},
      {"margin", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.similarity_margin = parse_number<double>(k, v);
       }},
      {"pairs_per_class", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.pairs_per_class = parse_number<std::size_t>(k, v);
       }},
      {"norm_eps", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.norm.eps = parse_number<double>(k, v);
       }},
      {"norm_momentum", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.norm.momentum = parse_number<double>(k, v);
       }},
      {"initial_threshold", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.model.initial_threshold = parse_number<double>(k, v);
       }},
      {"threshold_step", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.thresholds.step = parse_number<double>(k, v);
       }},
      {"reward_window", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.thresholds.window = parse_number<std::size_t>(k, v);
       }},
      {"freeze_sum", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.thresholds.freeze_sum = parse_number<int>(k, v);
       }},
      {"lr", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.adam.lr = parse_number<double>(k, v);
       }},
      {"beta1", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.adam.beta1 = parse_number<double>(k, v);
       }},
      {"beta2", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.adam.beta2 = parse_number<double>(k, v);
       }},
      {"adam_eps", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.adam.eps = parse_number<double>(k, v);
       }},
  };
  return table;
}

using GenSetter = std::function<void(GenerateConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, GenSetter>>& generate_setters() {
  static const std::vector<std::pair<std::string, GenSetter>> table = {
      {"preset", [](GenerateConfig& c, const std::string&, const std::string& v) {
         try {
           const auto keep_n = c.synth.num_nodes;
           const auto keep_seed = c.synth.seed;
           c.synth = synth_preset(v);
           c.synth.num_nodes = keep_n;
           c.synth.seed = keep_seed;
         } catch (const std::invalid_argument& e) {
           throw UsageError(e.what());
         }
         c.preset = v;
       }},
      {"nodes", [](GenerateConfig& c, const std::string& k, const std::string& v) {
         c.synth.num_nodes = parse_number<std::size_t>(k, v);
       }},
      {"seed", [](GenerateConfig& c, const std::string& k, const std::string& v) {
         c.synth.seed = parse_number<std::uint64_t>(k, v);
       }},
      {"fraud_ratio", [](GenerateConfig& c, const std::string& k, const std::string& v) {
         c.synth.fraud_ratio = parse_number<double>(k, v);
       }},
      {"degrees", [](GenerateConfig& c, const std::string& k, const std::string& v) {
         c.synth.mean_degree = parse_list(k, v);
         c.synth.num_relations = c.synth.mean_degree.size();
       }},
      {"q", [](GenerateConfig& c, const std::string& k, const std::string& v) {
         c.synth.same_label_weight = parse_list(k, v);
       }},
      {"dim", [](GenerateConfig& c, const std::string& k, const std::string& v) {
         c.synth.feature_dim = parse_number<std::size_t>(k, v);
       }},
      {"separation", [](GenerateConfig& c, const std::string& k, const std::string& v) {
         c.synth.separation = parse_number<double>(k, v);
       }},
      {"camouflage", [](GenerateConfig& c, const std::string& k, const std::string& v) {
         c.synth.camouflage = parse_number<double>(k, v);
       }},
      {"output_dir", [](GenerateConfig& c, const std::string&, const std::string& v) {
         c.output_dir = v;
       }},
  };
  return table;
}

template <typename Table>
std::vector<std::string> keys_of(const Table& t) {
  std::vector<std::string> out;
  for (const auto& [k, _] : t) out.push_back(k);
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text,
                                                    const std::string& source) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw UsageError(where + ": expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw UsageError(where + ": empty key");
    if (!out.emplace(key, value).second) throw UsageError(where + ": duplicate key '" + key + "'");
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(path + ": cannot read config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str(), path);
}

std::size_t RunConfig::batch_size() const {
  if (batch_size_override) return *batch_size_override;
  return preset == "dense" ? 256 : 512;
}

TrainConfig RunConfig::resolved() const {
  TrainConfig t = train;
  t.batch_size = batch_size();
  return t;
}

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys = keys_of(run_setters());
  return keys;
}

void apply_run_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [k, set] : run_setters()) {
    if (k == key) {
      set(cfg, key, value);
      return;
    }
  }
  throw UsageError("unknown config key '" + key + "'");
}

std::string describe(const RunConfig& cfg) {
  const TrainConfig t = cfg.resolved();
  std::ostringstream os;
  os << "dataset = " << cfg.dataset << '\n'
     << "output_dir = " << cfg.output_dir << '\n'
     << "preset = " << cfg.preset << '\n'
     << "train_fraction = " << format_real(t.train_fraction) << '\n'
     << "batch_size = " << t.batch_size << '\n'
     << "epochs = " << t.epochs << '\n'
     << "seed = " << t.seed << '\n'
     << "similarity = " << to_string(t.model.similarity) << '\n'
     << "norm = " << to_string(t.model.norm.mode) << '\n'
     << "iis_start = " << t.model.iis_start_layer << '\n'
     << "layers = " << t.model.num_layers << '\n'
     << "hidden = " << t.model.hidden_dim << '\n'
     << "sim_dim = " << t.model.similarity_dim << '\n'
     << "lambda_sim = " << format_real(t.model.lambda_sim) << '\n'
     << "margin = " << format_real(t.model.similarity_margin) << '\n'
     << "pairs_per_class = " << t.model.pairs_per_class << '\n'
     << "norm_eps = " << format_real(t.model.norm.eps) << '\n'
     << "norm_momentum = " << format_real(t.model.norm.momentum) << '\n'
     << "initial_threshold = " << format_real(t.model.initial_threshold) << '\n'
     << "threshold_step = " << format_real(t.thresholds.step) << '\n'
     << "reward_window = " << t.thresholds.window << '\n'
     << "freeze_sum = " << t.thresholds.freeze_sum << '\n'
     << "lr = " << format_real(t.adam.lr) << '\n'
     << "beta1 = " << format_real(t.adam.beta1) << '\n'
     << "beta2 = " << format_real(t.adam.beta2) << '\n'
     << "adam_eps = " << format_real(t.adam.eps) << '\n';
  return os.str();
}

const std::vector<std::string>& generate_config_keys() {
  static const std::vector<std::string> keys = keys_of(generate_setters());
  return keys;
}

void apply_generate_setting(GenerateConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [k, set] : generate_setters()) {
    if (k == key) {
      set(cfg, key, value);
      return;
    }
  }
  throw UsageError("unknown config key '" + key + "'");
}

}  // namespace lcgnn
