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
#include "lcgnn/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lcgnn {

SimilarityMode parse_similarity_mode(const std::string& s) {
  if (s == "l1") return SimilarityMode::L1;
  if (s == "cosine" || s == "cos") return SimilarityMode::Cosine;
  throw std::invalid_argument("unknown similarity mode '" + s + "' (expected l1 or cosine)");
}

std::string to_string(SimilarityMode m) { return m == SimilarityMode::L1 ? "l1" : "cosine"; }

SimilarityModule make_similarity_module(SimilarityMode mode, std::size_t input_dim,
                                        std::size_t cosine_dim, std::mt19937_64& rng,
                                        const std::string& name) {
  const std::size_t out = mode == SimilarityMode::L1 ? 2 : cosine_dim;
  if (out == 0) throw std::invalid_argument("similarity embed dim must be >= 1");
  const double bound = std::sqrt(6.0 / static_cast<double>(input_dim + out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix w(static_cast<Eigen::Index>(input_dim), static_cast<Eigen::Index>(out));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  SimilarityModule m;
  m.mode = mode;
  m.weight = Parameter(name + ".sim_w", std::move(w));
  m.bias = Parameter(name + ".sim_b", Matrix::Zero(1, static_cast<Eigen::Index>(out)));
  return m;
}

Matrix embed(const SimilarityModule& m, const Matrix& h) {
  Matrix z = h * m.weight.value;
  z.rowwise() += m.bias.value.row(0);
  if (m.mode == SimilarityMode::Cosine) return z.array().tanh().matrix();
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double mx = z.row(i).maxCoeff();
    z.row(i) = (z.row(i).array() - mx).exp().matrix();
    z.row(i) /= z.row(i).sum();
  }
  return z;
}

Tensor embed(Tape& tape, SimilarityModule& m, const Tensor& h) {
  Tensor z = add(matmul(h, tape.parameter(m.weight)), tape.parameter(m.bias));
  return m.mode == SimilarityMode::Cosine ? tanh(z) : softmax_rows(z);
}

CosineResult cosine_distance_embedded(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("cosine distance: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw NumericError("cosine distance: non-finite input");
    }
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return {1.0, true};
  const double s = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  return {1.0 - s, false};
}

double l1_distance_embedded(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ShapeError("l1 distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw NumericError("l1 distance: non-finite input");
    }
    s += std::abs(a[i] - b[i]);
  }
  return s / static_cast<double>(a.size());
}

double embedded_distance(SimilarityMode mode, std::span<const double> a,
                         std::span<const double> b) {
  return mode == SimilarityMode::Cosine ? cosine_distance_embedded(a, b).distance
                                        : l1_distance_embedded(a, b);
}

namespace {

Matrix row_of(std::span<const double> h, std::size_t expected) {
  if (h.size() != expected) {
    throw ShapeError("similarity: input has " + std::to_string(h.size()) + " features, module expects " +
                     std::to_string(expected));
  }
  Matrix m(1, static_cast<Eigen::Index>(h.size()));
  std::copy(h.begin(), h.end(), m.data());
  if (!m.allFinite()) throw NumericError("similarity: non-finite input");
  return m;
}

std::span<const double> span_of(const Matrix& m, Eigen::Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

CosineResult cosine_distance(const SimilarityModule& m, std::span<const double> h_u,
                             std::span<const double> h_v) {
  const Matrix zu = embed(m, row_of(h_u, m.input_dim()));
  const Matrix zv = embed(m, row_of(h_v, m.input_dim()));
  return cosine_distance_embedded(span_of(zu, 0), span_of(zv, 0));
}

double l1_distance(const SimilarityModule& m, std::span<const double> h_u,
                   std::span<const double> h_v) {
  const Matrix zu = embed(m, row_of(h_u, m.input_dim()));
  const Matrix zv = embed(m, row_of(h_v, m.input_dim()));
  return l1_distance_embedded(span_of(zu, 0), span_of(zv, 0));
}

Tensor pair_distances(Tape& tape, SimilarityModule& m, const Tensor& a, const Tensor& b) {
  Tensor za = embed(tape, m, a);
  Tensor zb = embed(tape, m, b);
  return m.mode == SimilarityMode::Cosine ? cosine_distance_rows(za, zb)
                                          : l1_distance_rows(za, zb);
}

std::size_t keep_count(double p, std::size_t n) {
  if (n == 0) return 0;
  // The slack absorbs drift from thresholds built by repeated +/- steps (0.5 + 2 * 0.02).
  const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

NeighborSelection select_by_distance(NodeId center, std::size_t relation,
                                     std::vector<NodeId> candidates,
                                     std::vector<double> distances, double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("threshold " + std::to_string(p) + " outside (0, 1]");
  }
  if (candidates.size() != distances.size()) {
    throw std::invalid_argument("select: candidates and distances misaligned");
  }
  NeighborSelection sel;
  sel.center = center;
  sel.relation = relation;
  sel.threshold = p;
  const std::size_t n = candidates.size();
  const std::size_t k = keep_count(p, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto closer = [&](std::size_t a, std::size_t b) {
    if (distances[a] != distances[b]) return distances[a] < distances[b];
    return candidates[a] < candidates[b];
  };
  const auto kth = order.begin() + static_cast<std::ptrdiff_t>(k);
  if (k < n) std::nth_element(order.begin(), kth, order.end(), closer);
  std::sort(order.begin(), kth, closer);
  sel.kept.reserve(k);
  sel.kept_distances.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    sel.kept.push_back(candidates[order[i]]);
    sel.kept_distances.push_back(distances[order[i]]);
  }
  sel.candidates = std::move(candidates);
  sel.distances = std::move(distances);
  return sel;
}

NeighborSelection select_neighbors(const SimilarityModule& m, std::span<const double> center_feat,
                                   const Matrix& candidate_feats,
                                   std::span<const NodeId> candidates, double p, NodeId center,
                                   std::size_t relation) {
  if (static_cast<std::size_t>(candidate_feats.rows()) != candidates.size()) {
    throw std::invalid_argument("select_neighbors: candidate features misaligned");
  }
  const Matrix zc = embed(m, row_of(center_feat, m.input_dim()));
  std::vector<double> dist(candidates.size());
  if (!candidates.empty()) {
    if (static_cast<std::size_t>(candidate_feats.cols()) != m.input_dim()) {
      throw ShapeError("select_neighbors: candidate feature width mismatch");
    }
    const Matrix z = embed(m, candidate_feats);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      dist[static_cast<std::size_t>(i)] = embedded_distance(m.mode, span_of(zc, 0), span_of(z, i));
    }
  }
  return select_by_distance(center, relation, {candidates.begin(), candidates.end()},
                            std::move(dist), p);
}

Tensor similarity_loss(Tape& tape, SimilarityModule& m, const Tensor& h,
                       std::span<const SimilarityPair> pairs, double margin) {
  if (pairs.empty()) return tape.constant(Matrix::Zero(1, 1));
  std::vector<std::size_t> a, b;
  std::vector<std::uint8_t> same;
  a.reserve(pairs.size());
  b.reserve(pairs.size());
  same.reserve(pairs.size());
  for (const auto& pr : pairs) {
    a.push_back(pr.center_row);
    b.push_back(pr.neighbor_row);
    same.push_back(pr.same_label ? 1 : 0);
  }
  Tensor d = pair_distances(tape, m, gather_rows(h, a), gather_rows(h, b));
  return margin_pair_loss(d, same, margin);
}

}  // namespace lcgnn
