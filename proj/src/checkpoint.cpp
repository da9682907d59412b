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
#include "lcgnn/checkpoint.hpp"

#include "lcgnn/graph.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace lcgnn {

namespace {

constexpr const char* kMagic = "# lcgnn checkpoint v1";

std::string hex(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", x);
  return buf;
}

double parse_hex(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw DataError("checkpoint:" + std::to_string(line) + ": bad real '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, '\t')) out.push_back(cur);
  return out;
}

void write_matrix(std::ostream& os, const std::string& tag, const std::string& name,
                  const Matrix& m) {
  os << tag << '\t' << name << '\t' << m.rows() << '\t' << m.cols();
  for (Eigen::Index i = 0; i < m.size(); ++i) os << '\t' << hex(m.data()[i]);
  os << '\n';
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ostringstream os;
  const ModelConfig& c = ckpt.model.config();
  os << kMagic << '\n';
  os << "config\tinput_dim\t" << c.input_dim << '\n';
  os << "config\tnum_relations\t" << c.num_relations << '\n';
  os << "config\tnum_layers\t" << c.num_layers << '\n';
  os << "config\thidden_dim\t" << c.hidden_dim << '\n';
  os << "config\tiis_start_layer\t" << c.iis_start_layer << '\n';
  os << "config\tsimilarity\t" << to_string(c.similarity) << '\n';
  os << "config\tsimilarity_dim\t" << c.similarity_dim << '\n';
  os << "config\tnorm\t" << to_string(c.norm.mode) << '\n';
  os << "config\tnorm_eps\t" << hex(c.norm.eps) << '\n';
  os << "config\tnorm_momentum\t" << hex(c.norm.momentum) << '\n';
  os << "config\tlambda_sim\t" << hex(c.lambda_sim) << '\n';
  os << "config\tsimilarity_margin\t" << hex(c.similarity_margin) << '\n';
  os << "config\tpairs_per_class\t" << c.pairs_per_class << '\n';
  os << "config\tclass_weight_0\t" << hex(c.class_weights[0]) << '\n';
  os << "config\tclass_weight_1\t" << hex(c.class_weights[1]) << '\n';
  os << "config\tinitial_threshold\t" << hex(c.initial_threshold) << '\n';
  os << "run\ttrain_fraction\t" << hex(ckpt.train_fraction) << '\n';
  os << "run\tseed\t" << ckpt.seed << '\n';

  const Model& m = ckpt.model;
  write_matrix(os, "param", m.input_weight().name, m.input_weight().value);
  write_matrix(os, "param", m.input_bias().name, m.input_bias().value);
  for (std::size_t l = 0; l < m.layers().size(); ++l) {
    const LayerParams& p = m.layers()[l];
    for (const Parameter* q : {&p.similarity.weight, &p.similarity.bias, &p.update_weight,
                               &p.update_bias, &p.classifier_weight, &p.classifier_bias}) {
      write_matrix(os, "param", q->name, q->value);
    }
    Matrix th(1, static_cast<Eigen::Index>(p.thresholds.size()));
    for (std::size_t r = 0; r < p.thresholds.size(); ++r) th(0, static_cast<Eigen::Index>(r)) = p.thresholds[r];
    const std::string prefix = "layer" + std::to_string(l + 1);
    write_matrix(os, "thresholds", prefix, th);
    write_matrix(os, "running_mean", prefix, p.running.mean);
    write_matrix(os, "running_var", prefix, p.running.var);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << os.str();
  if (!out) throw DataError(path.string() + ": write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": missing or unreadable checkpoint");
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw DataError(path.string() + ": not an lcgnn v1 checkpoint");
  }
  std::map<std::string, std::string> config, run;
  std::map<std::pair<std::string, std::string>, Matrix> tensors;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if ((f[0] == "config" || f[0] == "run") && f.size() == 3) {
      (f[0] == "config" ? config : run)[f[1]] = f[2];
      continue;
    }
    if (f.size() < 4) throw DataError("checkpoint:" + std::to_string(line_no) + ": malformed line");
    const auto rows = std::stoul(f[2]), cols = std::stoul(f[3]);
    if (f.size() != 4 + rows * cols) {
      throw DataError("checkpoint:" + std::to_string(line_no) + ": value count mismatch");
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows * cols; ++i) m.data()[i] = parse_hex(f[4 + i], line_no);
    tensors[{f[0], f[1]}] = std::move(m);
  }

  auto cfg_str = [&](const std::string& k) -> const std::string& {
    const auto it = config.find(k);
    if (it == config.end()) throw DataError("checkpoint: missing config key " + k);
    return it->second;
  };
  auto cfg_size = [&](const std::string& k) { return static_cast<std::size_t>(std::stoull(cfg_str(k))); };
  auto cfg_real = [&](const std::string& k) { return parse_hex(cfg_str(k), 0); };

  ModelConfig c;
  c.input_dim = cfg_size("input_dim");
  c.num_relations = cfg_size("num_relations");
  c.num_layers = cfg_size("num_layers");
  c.hidden_dim = cfg_size("hidden_dim");
  c.iis_start_layer = cfg_size("iis_start_layer");
  c.similarity = parse_similarity_mode(cfg_str("similarity"));
  c.similarity_dim = cfg_size("similarity_dim");
  c.norm.mode = parse_norm_mode(cfg_str("norm"));
  c.norm.eps = cfg_real("norm_eps");
  c.norm.momentum = cfg_real("norm_momentum");
  c.lambda_sim = cfg_real("lambda_sim");
  c.similarity_margin = cfg_real("similarity_margin");
  c.pairs_per_class = cfg_size("pairs_per_class");
  c.class_weights = {cfg_real("class_weight_0"), cfg_real("class_weight_1")};
  c.initial_threshold = cfg_real("initial_threshold");

  Checkpoint ckpt;
  ckpt.model = Model(c, 0);
  if (run.count("train_fraction")) ckpt.train_fraction = parse_hex(run["train_fraction"], 0);
  if (run.count("seed")) ckpt.seed = std::stoull(run["seed"]);

  auto take = [&](const std::string& tag, const std::string& name, Matrix& dst) {
    const auto it = tensors.find({tag, name});
    if (it == tensors.end()) throw DataError("checkpoint: missing " + tag + " " + name);
    if (it->second.rows() != dst.rows() || it->second.cols() != dst.cols()) {
      throw DataError("checkpoint: shape mismatch for " + tag + " " + name);
    }
    dst = it->second;
  };
  for (Parameter* p : ckpt.model.parameters()) take("param", p->name, p->value);
  std::vector<std::vector<double>> thresholds;
  for (std::size_t l = 0; l < c.num_layers; ++l) {
    const std::string prefix = "layer" + std::to_string(l + 1);
    LayerParams& lp = ckpt.model.layers()[l];
    Matrix th(1, static_cast<Eigen::Index>(c.num_relations));
    take("thresholds", prefix, th);
    thresholds.emplace_back(th.data(), th.data() + th.size());
    take("running_mean", prefix, lp.running.mean);
    take("running_var", prefix, lp.running.var);
  }
  ckpt.model.set_thresholds(thresholds);
  return ckpt;
}

}  // namespace lcgnn
