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
#include "lcgnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lcgnn {

namespace {

std::string shape_str(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

[[noreturn]] void shape_fail(const char* op, const Matrix& a, const Matrix& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                   shape_str(b));
}

void same_tape(const char* op, const Tensor& a, const Tensor& b) {
  if (&a.tape() != &b.tape()) {
    throw std::invalid_argument(std::string(op) + ": operands recorded on different tapes");
  }
}

}  // namespace

Parameter::Parameter(std::string n, Matrix init) : name(std::move(n)), value(std::move(init)) {
  grad = Matrix::Zero(value.rows(), value.cols());
}

void Parameter::zero_grad() { grad.setZero(value.rows(), value.cols()); }

const Matrix& Tensor::value() const { return tape_->value(id_); }
const Matrix& Tensor::grad() const { return tape_->grad_or_empty(id_); }

double Tensor::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw ShapeError("scalar(): tensor is " + shape_str(v));
  }
  return v(0, 0);
}

Tensor Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Tensor Tape::variable(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = record_gradients_;
  return push(std::move(n));
}

Tensor Tape::parameter(Parameter& p) {
  Node n;
  n.value = p.value;
  if (record_gradients_) {
    n.param = &p;
    n.requires_grad = true;
  }
  return push(std::move(n));
}

Tensor Tape::record(const char* op, Matrix value, std::initializer_list<Tensor> parents,
                    BackwardFn backward) {
  if (!value.allFinite()) {
    throw NumericError(std::string(op) + ": non-finite result");
  }
  Node n;
  n.value = std::move(value);
  if (record_gradients_) {
    for (const Tensor& p : parents) {
      if (&p.tape() != this) {
        throw std::invalid_argument(std::string(op) + ": parent from another tape");
      }
      n.requires_grad = n.requires_grad || nodes_[p.id()].requires_grad;
    }
    if (n.requires_grad) n.backward = std::move(backward);
  }
  return push(std::move(n));
}

Matrix& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0 && n.value.size() != 0) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  } else if (n.grad.rows() != n.value.rows() || n.grad.cols() != n.value.cols()) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

void Tape::backward(const Tensor& scalar) {
  if (&scalar.tape() != this) throw std::invalid_argument("backward: tensor from another tape");
  if (scalar.rows() != 1 || scalar.cols() != 1) {
    throw ShapeError("backward: expected a 1x1 tensor, got " + shape_str(scalar.value()));
  }
  grad(scalar.id())(0, 0) += 1.0;
  for (std::size_t i = scalar.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  same_tape("matmul", a, b);
  if (a.cols() != b.rows()) shape_fail("matmul", a.value(), b.value());
  Matrix out = a.value() * b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record("matmul", std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.requires_grad(ia)) t.grad(ia).noalias() += g * t.value(ib).transpose();
    if (t.requires_grad(ib)) t.grad(ib).noalias() += t.value(ia).transpose() * g;
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  same_tape("add", a, b);
  const bool broadcast = b.rows() == 1 && a.rows() != 1 && b.cols() == a.cols();
  if (!broadcast && (a.rows() != b.rows() || a.cols() != b.cols())) {
    shape_fail("add", a.value(), b.value());
  }
  Matrix out = a.value();
  if (broadcast) {
    out.rowwise() += b.value().row(0);
  } else {
    out += b.value();
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record("add", std::move(out), {a, b},
                         [ia, ib, broadcast](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           if (t.requires_grad(ia)) t.grad(ia) += g;
                           if (t.requires_grad(ib)) {
                             if (broadcast) {
                               t.grad(ib) += g.colwise().sum();
                             } else {
                               t.grad(ib) += g;
                             }
                           }
                         });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  same_tape("sub", a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_fail("sub", a.value(), b.value());
  Matrix out = a.value() - b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record("sub", std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.requires_grad(ia)) t.grad(ia) += g;
    if (t.requires_grad(ib)) t.grad(ib) -= g;
  });
}

Tensor scale(const Tensor& a, double factor) {
  Matrix out = a.value() * factor;
  const std::size_t ia = a.id();
  return a.tape().record("scale", std::move(out), {a}, [ia, factor](Tape& t, std::size_t self) {
    t.grad(ia) += t.grad(self) * factor;
  });
}

Tensor scale_rows(const Tensor& a, std::span<const double> factors) {
  if (static_cast<Eigen::Index>(factors.size()) != a.rows()) {
    throw ShapeError("scale_rows: " + std::to_string(factors.size()) + " factors for " +
                     shape_str(a.value()));
  }
  Eigen::Map<const Eigen::VectorXd> f(factors.data(), static_cast<Eigen::Index>(factors.size()));
  Matrix out = f.asDiagonal() * a.value();
  const std::size_t ia = a.id();
  Eigen::VectorXd fv = f;
  return a.tape().record("scale_rows", std::move(out), {a},
                         [ia, fv = std::move(fv)](Tape& t, std::size_t self) {
                           t.grad(ia) += fv.asDiagonal() * t.grad(self);
                         });
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  same_tape("concat_rows", a, b);
  if (a.rows() != b.rows()) shape_fail("concat_rows", a.value(), b.value());
  const Eigen::Index p = a.cols(), q = b.cols();
  Matrix out(a.rows(), p + q);
  out.leftCols(p) = a.value();
  out.rightCols(q) = b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record("concat_rows", std::move(out), {a, b},
                         [ia, ib, p, q](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           if (t.requires_grad(ia)) t.grad(ia) += g.leftCols(p);
                           if (t.requires_grad(ib)) t.grad(ib) += g.rightCols(q);
                         });
}

Tensor tanh(const Tensor& a) {
  Matrix out = a.value().array().tanh().matrix();
  const std::size_t ia = a.id();
  return a.tape().record("tanh", std::move(out), {a}, [ia](Tape& t, std::size_t self) {
    const Matrix& y = t.value(self);
    t.grad(ia).array() += t.grad(self).array() * (1.0 - y.array().square());
  });
}

Tensor relu(const Tensor& a) {
  Matrix out = a.value().cwiseMax(0.0);
  const std::size_t ia = a.id();
  return a.tape().record("relu", std::move(out), {a}, [ia](Tape& t, std::size_t self) {
    const Matrix& x = t.value(ia);
    t.grad(ia).array() += (x.array() > 0.0).select(t.grad(self).array(), 0.0);
  });
}

Tensor mean_rows(const Tensor& a) {
  if (a.rows() == 0) throw ShapeError("mean_rows: empty tensor");
  const double inv = 1.0 / static_cast<double>(a.rows());
  Matrix out = a.value().colwise().sum() * inv;
  const std::size_t ia = a.id();
  return a.tape().record("mean_rows", std::move(out), {a}, [ia, inv](Tape& t, std::size_t self) {
    t.grad(ia).rowwise() += t.grad(self).row(0) * inv;
  });
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i]) >= a.rows()) {
      throw ShapeError("gather_rows: row " + std::to_string(rows[i]) + " out of range for " +
                       shape_str(a.value()));
    }
    out.row(static_cast<Eigen::Index>(i)) = a.value().row(static_cast<Eigen::Index>(rows[i]));
  }
  const std::size_t ia = a.id();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return a.tape().record("gather_rows", std::move(out), {a},
                         [ia, idx = std::move(idx)](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           Matrix& ga = t.grad(ia);
                           for (std::size_t i = 0; i < idx.size(); ++i) {
                             ga.row(static_cast<Eigen::Index>(idx[i])) +=
                                 g.row(static_cast<Eigen::Index>(i));
                           }
                         });
}

Tensor combine_rows(const Tensor& a, const RowCombination& pattern) {
  if (pattern.offsets.empty() || pattern.indices.size() != pattern.weights.size() ||
      pattern.offsets.back() != pattern.indices.size()) {
    throw ShapeError("combine_rows: malformed pattern");
  }
  const auto m = static_cast<Eigen::Index>(pattern.rows());
  Matrix out = Matrix::Zero(m, a.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t k = pattern.offsets[i]; k < pattern.offsets[i + 1]; ++k) {
      if (static_cast<Eigen::Index>(pattern.indices[k]) >= a.rows()) {
        throw ShapeError("combine_rows: index out of range");
      }
      out.row(i) += pattern.weights[k] * a.value().row(static_cast<Eigen::Index>(pattern.indices[k]));
    }
  }
  const std::size_t ia = a.id();
  return a.tape().record("combine_rows", std::move(out), {a},
                         [ia, pattern](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad(self);
                           Matrix& ga = t.grad(ia);
                           for (std::size_t i = 0; i + 1 < pattern.offsets.size(); ++i) {
                             for (std::size_t k = pattern.offsets[i]; k < pattern.offsets[i + 1];
                                  ++k) {
                               ga.row(static_cast<Eigen::Index>(pattern.indices[k])) +=
                                   pattern.weights[k] * g.row(static_cast<Eigen::Index>(i));
                             }
                           }
                         });
}

Tensor softmax_rows(const Tensor& a) {
  Matrix out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double mx = a.value().row(i).maxCoeff();
    auto e = (a.value().row(i).array() - mx).exp();
    out.row(i) = e / e.sum();
  }
  const std::size_t ia = a.id();
  return a.tape().record("softmax_rows", std::move(out), {a}, [ia](Tape& t, std::size_t self) {
    const Matrix& y = t.value(self);
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double dot = g.row(i).dot(y.row(i));
      ga.row(i).array() += y.row(i).array() * (g.row(i).array() - dot);
    }
  });
}

Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                             std::span<const double> class_weights) {
  const Eigen::Index m = logits.rows(), k = logits.cols();
  if (static_cast<Eigen::Index>(labels.size()) != m) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                     " labels for " + shape_str(logits.value()));
  }
  if (static_cast<Eigen::Index>(class_weights.size()) != k) {
    throw ShapeError("softmax_cross_entropy: class weight count does not match logits");
  }
  if (m == 0) throw ShapeError("softmax_cross_entropy: empty batch");
  for (double w : class_weights) {
    if (!(w > 0.0)) throw std::invalid_argument("softmax_cross_entropy: weights must be positive");
  }
  if (!logits.value().allFinite()) throw NumericError("softmax_cross_entropy: non-finite logits");

  Matrix probs(m, k);
  double total = 0.0, weight_sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= k) throw std::invalid_argument("softmax_cross_entropy: label out of range");
    const double mx = logits.value().row(i).maxCoeff();
    auto e = (logits.value().row(i).array() - mx).exp();
    const double s = e.sum();
    probs.row(i) = e / s;
    const double lse = mx + std::log(s);
    const double w = class_weights[static_cast<std::size_t>(y)];
    total += w * (lse - logits.value()(i, y));
    weight_sum += w;
  }
  Matrix out(1, 1);
  out(0, 0) = total / weight_sum;
  const std::size_t il = logits.id();
  std::vector<int> ys(labels.begin(), labels.end());
  std::vector<double> ws(class_weights.begin(), class_weights.end());
  return logits.tape().record(
      "softmax_cross_entropy", std::move(out), {logits},
      [il, probs = std::move(probs), ys = std::move(ys), ws = std::move(ws), weight_sum](
          Tape& t, std::size_t self) {
        const double g = t.grad(self)(0, 0);
        Matrix& gl = t.grad(il);
        for (Eigen::Index i = 0; i < probs.rows(); ++i) {
          const int y = ys[static_cast<std::size_t>(i)];
          const double c = g * ws[static_cast<std::size_t>(y)] / weight_sum;
          gl.row(i) += c * probs.row(i);
          gl(i, y) -= c;
        }
      });
}

Tensor cosine_distance_rows(const Tensor& a, const Tensor& b) {
  same_tape("cosine_distance_rows", a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    shape_fail("cosine_distance_rows", a.value(), b.value());
  }
  const Eigen::Index m = a.rows();
  Matrix out(m, 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double na = a.value().row(i).norm(), nb = b.value().row(i).norm();
    if (na == 0.0 || nb == 0.0) {
      out(i, 0) = 1.0;
    } else {
      const double s = a.value().row(i).dot(b.value().row(i)) / (na * nb);
      out(i, 0) = 1.0 - std::clamp(s, -1.0, 1.0);
    }
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      "cosine_distance_rows", std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        const Matrix& A = t.value(ia);
        const Matrix& B = t.value(ib);
        const Matrix& g = t.grad(self);
        const bool ga_on = t.requires_grad(ia), gb_on = t.requires_grad(ib);
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
          const double na = A.row(i).norm(), nb = B.row(i).norm();
          if (na == 0.0 || nb == 0.0) continue;
          const double s = A.row(i).dot(B.row(i)) / (na * nb);
          // d(1 - s)/da = -(b/(|a||b|) - s a/|a|^2)
          if (ga_on) {
            t.grad(ia).row(i) -= g(i, 0) * (B.row(i) / (na * nb) - s * A.row(i) / (na * na));
          }
          if (gb_on) {
            t.grad(ib).row(i) -= g(i, 0) * (A.row(i) / (na * nb) - s * B.row(i) / (nb * nb));
          }
        }
      });
}

Tensor l1_distance_rows(const Tensor& a, const Tensor& b) {
  same_tape("l1_distance_rows", a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() == 0) {
    shape_fail("l1_distance_rows", a.value(), b.value());
  }
  const double inv = 1.0 / static_cast<double>(a.cols());
  Matrix out = (a.value() - b.value()).cwiseAbs().rowwise().sum() * inv;
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      "l1_distance_rows", std::move(out), {a, b}, [ia, ib, inv](Tape& t, std::size_t self) {
        Matrix sign = (t.value(ia) - t.value(ib)).array().sign().matrix();
        Matrix g = (t.grad(self) * inv).asDiagonal() * sign;
        if (t.requires_grad(ia)) t.grad(ia) += g;
        if (t.requires_grad(ib)) t.grad(ib) -= g;
      });
}

Tensor margin_pair_loss(const Tensor& distances, std::span<const std::uint8_t> same_label,
                        double margin) {
  if (distances.cols() != 1 && distances.rows() != 0) {
    throw ShapeError("margin_pair_loss: distances must be a column");
  }
  if (static_cast<Eigen::Index>(same_label.size()) != distances.rows()) {
    throw ShapeError("margin_pair_loss: same_label length mismatch");
  }
  const Eigen::Index m = distances.rows();
  Matrix out = Matrix::Zero(1, 1);
  if (m == 0) return distances.tape().constant(std::move(out));
  const Matrix& d = distances.value();
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    total += same_label[static_cast<std::size_t>(i)] ? d(i, 0) : std::max(0.0, margin - d(i, 0));
  }
  out(0, 0) = total / static_cast<double>(m);
  const std::size_t id = distances.id();
  std::vector<std::uint8_t> same(same_label.begin(), same_label.end());
  return distances.tape().record(
      "margin_pair_loss", std::move(out), {distances},
      [id, same = std::move(same), margin](Tape& t, std::size_t self) {
        const Matrix& dv = t.value(id);
        const double g = t.grad(self)(0, 0) / static_cast<double>(dv.rows());
        Matrix& gd = t.grad(id);
        for (Eigen::Index i = 0; i < dv.rows(); ++i) {
          if (same[static_cast<std::size_t>(i)]) {
            gd(i, 0) += g;
          } else if (margin - dv(i, 0) > 0.0) {
            gd(i, 0) -= g;
          }
        }
      });
}

}  // namespace lcgnn
