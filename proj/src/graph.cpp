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
#include "lcgnn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lcgnn {

namespace fs = std::filesystem;

namespace {

Csr build_csr(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  Csr csr;
  csr.offsets.reserve(n + 1);
  csr.offsets.push_back(0);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    csr.indices.insert(csr.indices.end(), list.begin(), list.end());
    csr.offsets.push_back(csr.indices.size());
  }
  return csr;
}

class LineReader {
 public:
  explicit LineReader(const fs::path& path) : path_(path), in_(path) {
    if (!in_) throw DataError(path_.filename().string() + ": missing or unreadable file");
  }

  /// Next non-empty line split on tabs; false at end of file.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      if (line_.empty()) continue;
      fields.clear();
      std::string_view rest(line_);
      for (;;) {
        const auto tab = rest.find('\t');
        fields.push_back(rest.substr(0, tab));
        if (tab == std::string_view::npos) break;
        rest.remove_prefix(tab + 1);
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(path_.filename().string() + ":" + std::to_string(line_no_) + ": " + what);
  }

  template <typename T>
  T parse(std::string_view field, const char* what) const {
    T value{};
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || field.empty()) {
      fail(std::string("non-numeric ") + what + " '" + std::string(field) + "'");
    }
    return value;
  }

  NodeId parse_node(std::string_view field, std::size_t num_nodes) const {
    const auto id = parse<std::uint64_t>(field, "node id");
    if (id >= num_nodes) {
      fail("node id " + std::to_string(id) + " out of range (num_nodes = " +
           std::to_string(num_nodes) + ")");
    }
    return static_cast<NodeId>(id);
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string() + ": write failed");
}

}  // namespace

MultiRelationGraph::MultiRelationGraph(Matrix features, std::vector<std::uint8_t> labels,
                                       const std::vector<std::vector<Edge>>& relation_edges)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw std::invalid_argument("feature rows (" + std::to_string(features_.rows()) +
                                ") != label count (" + std::to_string(labels_.size()) + ")");
  }
  for (auto y : labels_) {
    if (y > 1) throw std::invalid_argument("labels must be 0 or 1");
  }
  relations_.reserve(relation_edges.size());
  for (const auto& edges : relation_edges) relations_.push_back(build_csr(labels_.size(), edges));
}

void MultiRelationGraph::check_ids(NodeId u, std::size_t r) const {
  if (u >= num_nodes()) {
    throw std::out_of_range("node " + std::to_string(u) + " out of range");
  }
  if (r >= num_relations()) {
    throw std::out_of_range("relation " + std::to_string(r) + " out of range");
  }
}

std::span<const NodeId> MultiRelationGraph::neighbors(NodeId u, std::size_t r) const {
  check_ids(u, r);
  const Csr& c = relations_[r];
  return {c.indices.data() + c.offsets[u], c.offsets[u + 1] - c.offsets[u]};
}

std::vector<NodeId> MultiRelationGraph::two_hop_candidates(NodeId u, std::size_t r) const {
  check_ids(u, r);
  const auto first = neighbors(u, r);
  std::vector<NodeId> out(first.begin(), first.end());
  for (NodeId v : first) {
    const auto second = neighbors(v, r);
    out.insert(out.end(), second.begin(), second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove(out.begin(), out.end(), u), out.end());
  return out;
}

std::span<const NodeId> MultiRelationGraph::two_hop_neighbors(NodeId u, std::size_t r) const {
  check_ids(u, r);
  const Csr* table = nullptr;
  {
    std::lock_guard<std::mutex> lock(two_hop_->mutex);
    auto& tables = two_hop_->tables;
    if (tables.size() < relations_.size()) tables.resize(relations_.size());
    if (!tables[r]) {
      auto c = std::make_unique<Csr>();
      c->offsets.reserve(num_nodes() + 1);
      c->offsets.push_back(0);
      for (std::size_t v = 0; v < num_nodes(); ++v) {
        const auto cands = two_hop_candidates(static_cast<NodeId>(v), r);
        c->indices.insert(c->indices.end(), cands.begin(), cands.end());
        c->offsets.push_back(c->indices.size());
      }
      tables[r] = std::move(c);
    }
    table = tables[r].get();
  }
  return {table->indices.data() + table->offsets[u], table->degree(u)};
}

void MultiRelationGraph::validate() const {
  const std::size_t n = num_nodes();
  if (static_cast<std::size_t>(features_.rows()) != n) throw std::logic_error("feature rows != n");
  for (std::size_t r = 0; r < relations_.size(); ++r) {
    const Csr& c = relations_[r];
    if (c.offsets.size() != n + 1 || c.offsets.front() != 0 ||
        c.offsets.back() != c.indices.size()) {
      throw std::logic_error("relation " + std::to_string(r) + ": malformed offsets");
    }
    for (std::size_t u = 0; u < n; ++u) {
      if (c.offsets[u] > c.offsets[u + 1]) throw std::logic_error("offsets not monotone");
      for (std::size_t k = c.offsets[u]; k < c.offsets[u + 1]; ++k) {
        const NodeId v = c.indices[k];
        if (v >= n) throw std::logic_error("column index out of range");
        if (v == u) throw std::logic_error("self-loop stored");
        if (k > c.offsets[u] && c.indices[k - 1] >= v) {
          throw std::logic_error("neighbor list not sorted/unique");
        }
        const auto back = neighbors(v, r);
        if (!std::binary_search(back.begin(), back.end(), static_cast<NodeId>(u))) {
          throw std::logic_error("adjacency not symmetric");
        }
      }
    }
  }
}

bool operator==(const MultiRelationGraph& a, const MultiRelationGraph& b) {
  if (a.labels_ != b.labels_ || a.features_.rows() != b.features_.rows() ||
      a.features_.cols() != b.features_.cols() || a.relations_.size() != b.relations_.size()) {
    return false;
  }
  // Bit-exact comparison of features.
  if (!std::equal(a.features_.data(), a.features_.data() + a.features_.size(),
                  b.features_.data(), [](double x, double y) {
                    return std::memcmp(&x, &y, sizeof(double)) == 0;
                  })) {
    return false;
  }
  for (std::size_t r = 0; r < a.relations_.size(); ++r) {
    if (a.relations_[r].offsets != b.relations_[r].offsets ||
        a.relations_[r].indices != b.relations_[r].indices) {
      return false;
    }
  }
  return true;
}

DegreeStats degree_stats(const MultiRelationGraph& g) {
  DegreeStats stats;
  const std::size_t n = g.num_nodes();
  std::size_t total_edges = 0;
  for (std::size_t r = 0; r < g.num_relations(); ++r) {
    const Csr& c = g.relation(r);
    RelationStats rs;
    rs.edges = c.indices.size() / 2;
    rs.mean_degree = n == 0 ? 0.0 : static_cast<double>(c.indices.size()) / static_cast<double>(n);
    for (std::size_t u = 0; u < n; ++u) rs.max_degree = std::max(rs.max_degree, c.degree(u));
    total_edges += rs.edges;
    stats.relations.push_back(rs);
  }
  const double pairs = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
  if (pairs > 0 && g.num_relations() > 0) {
    stats.density = static_cast<double>(total_edges) /
                    (static_cast<double>(g.num_relations()) * pairs);
  }
  return stats;
}

MultiRelationGraph load_graph(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + ": not a directory");
  std::vector<std::string_view> f;

  LineReader meta(dir / "meta.tsv");
  if (!meta.next(f)) meta.fail("empty meta file");
  if (f.size() != 3) meta.fail("expected num_nodes, d, R");
  const auto n = meta.parse<std::size_t>(f[0], "num_nodes");
  const auto d = meta.parse<std::size_t>(f[1], "feature dimension");
  const auto num_rel = meta.parse<std::size_t>(f[2], "relation count");

  Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::uint8_t> seen(n, 0);
  LineReader feat(dir / "features.tsv");
  while (feat.next(f)) {
    if (f.size() != d + 1) {
      feat.fail("expected node id and " + std::to_string(d) + " features, got " +
                std::to_string(f.size() - 1));
    }
    const NodeId u = feat.parse_node(f[0], n);
    if (seen[u]) feat.fail("duplicate node id " + std::to_string(u));
    seen[u] = 1;
    for (std::size_t i = 0; i < d; ++i) {
      features(u, static_cast<Eigen::Index>(i)) = feat.parse<double>(f[i + 1], "feature");
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (!seen[u]) throw DataError("features.tsv: no row for node " + std::to_string(u));
  }

  std::vector<std::uint8_t> labels(n, 0);
  std::fill(seen.begin(), seen.end(), 0);
  LineReader lab(dir / "labels.tsv");
  while (lab.next(f)) {
    if (f.size() != 2) lab.fail("expected node id and label");
    const NodeId u = lab.parse_node(f[0], n);
    const auto y = lab.parse<unsigned>(f[1], "label");
    if (y > 1) lab.fail("label must be 0 or 1");
    if (seen[u]) lab.fail("duplicate node id " + std::to_string(u));
    seen[u] = 1;
    labels[u] = static_cast<std::uint8_t>(y);
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (!seen[u]) throw DataError("labels.tsv: no label for node " + std::to_string(u));
  }

  std::vector<std::vector<Edge>> edges(num_rel);
  for (std::size_t r = 0; r < num_rel; ++r) {
    LineReader er(dir / ("edges_r" + std::to_string(r + 1) + ".tsv"));
    while (er.next(f)) {
      if (f.size() != 2) er.fail("expected two node ids");
      edges[r].emplace_back(er.parse_node(f[0], n), er.parse_node(f[1], n));
    }
  }
  return MultiRelationGraph(std::move(features), std::move(labels), edges);
}

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_real failed");
  return std::string(buf, ptr);
}

void save_graph(const MultiRelationGraph& g, const fs::path& dir) {
  fs::create_directories(dir);
  const std::size_t n = g.num_nodes(), d = g.feature_dim();
  write_file(dir / "meta.tsv", std::to_string(n) + "\t" + std::to_string(d) + "\t" +
                                   std::to_string(g.num_relations()) + "\n");
  std::string text;
  for (std::size_t u = 0; u < n; ++u) {
    text += std::to_string(u);
    for (std::size_t i = 0; i < d; ++i) {
      text += '\t';
      text += format_real(g.features()(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(i)));
    }
    text += '\n';
  }
  write_file(dir / "features.tsv", text);

  text.clear();
  for (std::size_t u = 0; u < n; ++u) {
    text += std::to_string(u) + "\t" + std::to_string(g.labels()[u]) + "\n";
  }
  write_file(dir / "labels.tsv", text);

  for (std::size_t r = 0; r < g.num_relations(); ++r) {
    text.clear();
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v : g.neighbors(u, r)) {
        if (u < v) text += std::to_string(u) + "\t" + std::to_string(v) + "\n";
      }
    }
    write_file(dir / ("edges_r" + std::to_string(r + 1) + ".tsv"), text);
  }
}

}  // namespace lcgnn
