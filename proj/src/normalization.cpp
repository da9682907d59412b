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
#include "lcgnn/normalization.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lcgnn {

NormMode parse_norm_mode(const std::string& s) {
  if (s == "none") return NormMode::None;
  if (s == "node" || s == "node-wise" || s == "nodewise") return NormMode::NodeWise;
  if (s == "batch" || s == "batch-wise" || s == "batchwise") return NormMode::BatchWise;
  throw std::invalid_argument("unknown norm mode '" + s + "' (expected none, node or batch)");
}

std::string to_string(NormMode m) {
  switch (m) {
    case NormMode::None: return "none";
    case NormMode::NodeWise: return "node";
    case NormMode::BatchWise: return "batch";
  }
  return "none";
}

RunningStats RunningStats::identity(Eigen::Index d) {
  return {Matrix::Zero(1, d), Matrix::Ones(1, d)};
}

namespace {

void check_inputs(const char* op, const Tensor& h, const Tensor& s,
                  std::span<const double> n_selected) {
  if (&h.tape() != &s.tape()) throw std::invalid_argument(std::string(op) + ": different tapes");
  if (h.rows() != s.rows() || h.cols() != s.cols()) {
    throw ShapeError(std::string(op) + ": h and message sums differ in shape");
  }
  if (static_cast<Eigen::Index>(n_selected.size()) != h.rows()) {
    throw ShapeError(std::string(op) + ": n_selected length mismatch");
  }
  for (double n : n_selected) {
    if (n < 0.0) throw std::invalid_argument(std::string(op) + ": negative selection count");
  }
}

}  // namespace

Tensor node_wise_normalize(const Tensor& h, const Tensor& message_sums,
                           std::span<const double> n_selected, double eps) {
  check_inputs("node_wise_normalize", h, message_sums, n_selected);
  if (!(eps > 0.0)) throw std::invalid_argument("node_wise_normalize: eps must be positive");
  const Matrix& H = h.value();
  const Matrix& S = message_sums.value();
  const Eigen::Index m = H.rows();
  const auto d = static_cast<double>(H.cols());

  std::vector<double> mu(static_cast<std::size_t>(m), 0.0), var(static_cast<std::size_t>(m), 0.0);
  Matrix out = H;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double n = n_selected[static_cast<std::size_t>(j)];
    if (n == 0.0) continue;
    const double denom = d * n;
    const double mu_j = S.row(j).sum() / denom;
    const double var_j = (S.row(j).array() - mu_j).square().sum() / denom;
    mu[static_cast<std::size_t>(j)] = mu_j;
    var[static_cast<std::size_t>(j)] = var_j;
    out.row(j) = (H.row(j).array() - mu_j) / std::sqrt(var_j + eps);
  }

  const std::size_t ih = h.id(), is = message_sums.id();
  std::vector<double> ns(n_selected.begin(), n_selected.end());
  return h.tape().record(
      "node_wise_normalize", std::move(out), {h, message_sums},
      [ih, is, eps, d, ns = std::move(ns), mu = std::move(mu), var = std::move(var)](
          Tape& t, std::size_t self) {
        const Matrix& H = t.value(ih);
        const Matrix& S = t.value(is);
        const Matrix& g = t.grad(self);
        const bool gh_on = t.requires_grad(ih), gs_on = t.requires_grad(is);
        for (Eigen::Index j = 0; j < H.rows(); ++j) {
          const auto uj = static_cast<std::size_t>(j);
          if (ns[uj] == 0.0) {
            if (gh_on) t.grad(ih).row(j) += g.row(j);
            continue;
          }
          const double denom = d * ns[uj];
          const double inv = 1.0 / std::sqrt(var[uj] + eps);
          if (gh_on) t.grad(ih).row(j) += g.row(j) * inv;
          if (!gs_on) continue;
          const auto centered_h = H.row(j).array() - mu[uj];
          const auto centered_s = S.row(j).array() - mu[uj];
          const double g_mu_direct = -inv * g.row(j).sum();
          const double g_var = -0.5 * inv * inv * inv * (g.row(j).array() * centered_h).sum();
          const double g_mu = g_mu_direct - g_var * 2.0 / denom * centered_s.sum();
          t.grad(is).row(j).array() += g_var * 2.0 / denom * centered_s + g_mu / denom;
        }
      });
}

Tensor batch_wise_normalize(const Tensor& h, const Tensor& message_sums,
                            std::span<const double> n_selected,
                            std::span<const std::uint8_t> stats_rows, bool training,
                            const NormConfig& cfg, RunningStats& running) {
  check_inputs("batch_wise_normalize", h, message_sums, n_selected);
  const Matrix& H = h.value();
  const Matrix& S = message_sums.value();
  const Eigen::Index m = H.rows(), d = H.cols();
  if (m == 0) throw std::invalid_argument("batch_wise_normalize: empty batch");
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("batch_wise_normalize: eps must be positive");
  if (!stats_rows.empty() && static_cast<Eigen::Index>(stats_rows.size()) != m) {
    throw ShapeError("batch_wise_normalize: stats_rows length mismatch");
  }
  if (running.mean.cols() != d || running.var.cols() != d) {
    throw ShapeError("batch_wise_normalize: running statistics have the wrong width");
  }

  std::vector<std::size_t> members;
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (n_selected[uj] > 0.0 && (stats_rows.empty() || stats_rows[uj])) members.push_back(uj);
  }
  const bool batch_stats = training && !members.empty();

  Eigen::RowVectorXd mu, var;
  if (batch_stats) {
    const auto inv_m = 1.0 / static_cast<double>(members.size());
    mu = Eigen::RowVectorXd::Zero(d);
    for (std::size_t j : members) {
      mu += S.row(static_cast<Eigen::Index>(j)) / n_selected[j];
    }
    mu *= inv_m;
    var = Eigen::RowVectorXd::Zero(d);
    for (std::size_t j : members) {
      var += (S.row(static_cast<Eigen::Index>(j)) - mu).array().square().matrix() / n_selected[j];
    }
    var *= inv_m;
    running.mean = cfg.momentum * running.mean + (1.0 - cfg.momentum) * mu;
    running.var = cfg.momentum * running.var + (1.0 - cfg.momentum) * var;
  } else {
    mu = running.mean.row(0);
    var = running.var.row(0);
  }
  const Eigen::RowVectorXd inv = (var.array() + cfg.eps).rsqrt().matrix();

  Matrix out = H;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (n_selected[static_cast<std::size_t>(j)] == 0.0) continue;
    out.row(j) = ((H.row(j) - mu).array() * inv.array()).matrix();
  }

  const std::size_t ih = h.id(), is = message_sums.id();
  std::vector<double> ns(n_selected.begin(), n_selected.end());
  return h.tape().record(
      "batch_wise_normalize", std::move(out), {h, message_sums},
      [ih, is, batch_stats, ns = std::move(ns), members = std::move(members), mu, var, inv](
          Tape& t, std::size_t self) {
        const Matrix& H = t.value(ih);
        const Matrix& S = t.value(is);
        const Matrix& g = t.grad(self);
        const Eigen::Index m = H.rows();
        Eigen::RowVectorXd g_mu = Eigen::RowVectorXd::Zero(H.cols());
        Eigen::RowVectorXd g_var = Eigen::RowVectorXd::Zero(H.cols());
        const bool gh_on = t.requires_grad(ih);
        for (Eigen::Index j = 0; j < m; ++j) {
          if (ns[static_cast<std::size_t>(j)] == 0.0) {
            if (gh_on) t.grad(ih).row(j) += g.row(j);
            continue;
          }
          if (gh_on) t.grad(ih).row(j).array() += g.row(j).array() * inv.array();
          if (batch_stats) {
            g_mu.array() -= g.row(j).array() * inv.array();
            g_var.array() -= 0.5 * g.row(j).array() * (H.row(j) - mu).array() * inv.array().cube();
          }
        }
        if (!batch_stats || !t.requires_grad(is)) return;
        const auto inv_m = 1.0 / static_cast<double>(members.size());
        // sigma2 also depends on mu.
        Eigen::RowVectorXd dvar_dmu = Eigen::RowVectorXd::Zero(H.cols());
        for (std::size_t j : members) {
          dvar_dmu -= 2.0 * inv_m * (S.row(static_cast<Eigen::Index>(j)) - mu) / ns[j];
        }
        const Eigen::RowVectorXd g_mu_total = g_mu + (g_var.array() * dvar_dmu.array()).matrix();
        Matrix& gs = t.grad(is);
        for (std::size_t j : members) {
          const auto row = static_cast<Eigen::Index>(j);
          const double c = inv_m / ns[j];
          gs.row(row).array() += 2.0 * c * g_var.array() * (S.row(row) - mu).array() +
                                 c * g_mu_total.array();
        }
      });
}

}  // namespace lcgnn
