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

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcgnn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A learnable matrix with its gradient accumulator.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string name, Matrix init);

  void zero_grad();
};

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Tensor {
 public:
  Tensor() = default;

  const Matrix& value() const;
  const Matrix& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode differentiation record. Nodes are appended in evaluation order,
/// so parents always precede children and backward() walks the list in reverse.
class Tape {
 public:
  /// Receives the tape and the id of the node whose gradient is being propagated.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  explicit Tape(bool record_gradients = true) : record_gradients_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor constant(Matrix value);
  Tensor variable(Matrix value);
  /// Gradients reaching this node are added to `p.grad` by backward().
  Tensor parameter(Parameter& p);

  /// Appends an op result. `op` names the op in non-finite diagnostics.
  Tensor record(const char* op, Matrix value, std::initializer_list<Tensor> parents,
                BackwardFn backward);

  void backward(const Tensor& scalar);

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  /// Gradient accumulator of a node, allocated as zeros on first use.
  Matrix& grad(std::size_t id);
  const Matrix& grad_or_empty(std::size_t id) const { return nodes_[id].grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  bool records_gradients() const { return record_gradients_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  Tensor push(Node node);

  // deque keeps references returned by value() stable while nodes are appended.
  std::deque<Node> nodes_;
  bool record_gradients_;
};

/// Sparse row-combination pattern: output row i = sum_k weights[k] * input[indices[k]]
/// for k in [offsets[i], offsets[i+1]).
struct RowCombination {
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> indices;
  std::vector<double> weights;

  std::size_t rows() const { return offsets.size() - 1; }
};

// Differentiable ops. Every op checks shapes and rejects non-finite results.

Tensor matmul(const Tensor& a, const Tensor& b);
/// Elementwise sum; `b` may also be a single row broadcast over the rows of `a`.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
/// Multiplies row i of `a` by factors[i].
Tensor scale_rows(const Tensor& a, std::span<const double> factors);
/// Joins each row of `a` with the matching row of `b`: (m x p), (m x q) -> (m x (p+q)).
Tensor concat_rows(const Tensor& a, const Tensor& b);
Tensor tanh(const Tensor& a);
/// ReLU with subgradient 0 at 0.
Tensor relu(const Tensor& a);
/// Column-wise mean over rows: (m x n) -> (1 x n).
Tensor mean_rows(const Tensor& a);
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows);
Tensor combine_rows(const Tensor& a, const RowCombination& pattern);
Tensor softmax_rows(const Tensor& a);

/// Class-weighted mean negative log-likelihood: sum_j w[y_j] * nll_j / sum_j w[y_j].
Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                             std::span<const double> class_weights);

/// Row-wise cosine distance 1 - cos(a_i, b_i) -> (m x 1). A zero-norm row yields
/// distance 1 with zero gradient.
Tensor cosine_distance_rows(const Tensor& a, const Tensor& b);
/// Row-wise mean absolute difference -> (m x 1). Subgradient 0 where entries tie.
Tensor l1_distance_rows(const Tensor& a, const Tensor& b);

/// Contrastive hinge over pair distances (m x 1):
/// mean_j [same_j * d_j + (1 - same_j) * max(0, margin - d_j)]. Empty input -> 0.
Tensor margin_pair_loss(const Tensor& distances, std::span<const std::uint8_t> same_label,
                        double margin);

}  // namespace lcgnn
