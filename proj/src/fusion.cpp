// Copyright 2026 The layoutret Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "layoutret/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "layoutret/error.hpp"

namespace layoutret {
namespace {

void RequireFinite(const Matrix& m, const char* what) {
  if (!m.Finite()) {
    throw ContractError(std::string(what) + " contains NaN or Inf");
  }
}

double MaxOf(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  return m;
}

double LogSumExp(std::span<const double> xs) {
  const double m = MaxOf(xs);
  double z = 0;
  for (double x : xs) z += std::exp(x - m);
  return m + std::log(z);
}

// Per-query pieces of the objective on scaled scores x = s / tau. With
// delta = logZ_neg - logZ_pos the query's loss is softplus(delta) and
// sigma = Z_neg / Z_all = sigmoid(delta).
struct ScaledQuery {
  std::vector<double> pos;
  std::vector<double> neg;
  double log_z_pos = 0;
  double log_z_neg = -std::numeric_limits<double>::infinity();
  double loss = 0;
  double sigma = 0;
};

ScaledQuery Scale(const QueryScores& q, double tau) {
  ScaledQuery out;
  out.pos.reserve(q.positives.size());
  out.neg.reserve(q.negatives.size());
  for (double s : q.positives) out.pos.push_back(s / tau);
  for (double s : q.negatives) out.neg.push_back(s / tau);
  out.log_z_pos = LogSumExp(out.pos);
  if (out.neg.empty()) return out;
  out.log_z_neg = LogSumExp(out.neg);
  const double delta = out.log_z_neg - out.log_z_pos;
  if (delta > 0) {
    out.loss = delta + std::log1p(std::exp(-delta));
    out.sigma = 1.0 / (1.0 + std::exp(-delta));
  } else {
    const double e = std::exp(delta);
    out.loss = std::log1p(e);
    out.sigma = e / (1.0 + e);
  }
  return out;
}

void ValidateBatch(const LossBatch& batch) {
  if (!(batch.tau > 0) || !std::isfinite(batch.tau)) {
    throw ContractError("temperature must be positive and finite");
  }
  if (batch.queries.empty()) throw ContractError("empty loss batch");
  for (std::size_t k = 0; k < batch.queries.size(); ++k) {
    const QueryScores& q = batch.queries[k];
    if (q.positives.empty()) {
      throw ContractError("query " + std::to_string(k) + " has no positive");
    }
    auto finite = [](double s) { return std::isfinite(s); };
    if (!std::all_of(q.positives.begin(), q.positives.end(), finite) ||
        !std::all_of(q.negatives.begin(), q.negatives.end(), finite)) {
      throw ContractError("query " + std::to_string(k) +
                          " has a non-finite score");
    }
  }
}

}  // namespace

Matrix AttentionWeights(const Matrix& q, const Matrix& k) {
  if (k.rows() == 0) throw ContractError("attention needs at least one key");
  if (q.cols() != k.cols() || q.cols() == 0) {
    throw ContractError("query/key dimension mismatch");
  }
  RequireFinite(q, "query");
  RequireFinite(k, "key");

  const std::size_t n = q.rows();
  const std::size_t m = k.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  Matrix weights(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    auto w = weights.row(i);
    const auto qi = q.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      const auto kj = k.row(j);
      double dot = 0;
      for (std::size_t c = 0; c < qi.size(); ++c) dot += qi[c] * kj[c];
      w[j] = dot * scale;
    }
    const double shift = MaxOf(w);
    double z = 0;
    for (double& x : w) {
      x = std::exp(x - shift);
      z += x;
    }
    for (double& x : w) x /= z;
  }
  return weights;
}

Matrix Attention(const Matrix& q, const Matrix& k, const Matrix& v) {
  if (v.rows() != k.rows()) throw ContractError("key/value count mismatch");
  RequireFinite(v, "value");
  const Matrix weights = AttentionWeights(q, k);

  Matrix out(q.rows(), v.cols());
  for (std::size_t i = 0; i < q.rows(); ++i) {
    auto o = out.row(i);
    const auto w = weights.row(i);
    for (std::size_t j = 0; j < v.rows(); ++j) {
      const auto vj = v.row(j);
      for (std::size_t c = 0; c < vj.size(); ++c) o[c] += w[j] * vj[c];
    }
  }
  return out;
}

Matrix Contextualize(const Matrix& block_embeddings, const Matrix& global) {
  if (block_embeddings.rows() == 0) return Matrix(0, global.cols());
  return Attention(block_embeddings, global, global);
}

std::vector<double> FuseAndProject(std::span<const double> h,
                                   std::span<const double> ctx,
                                   const Matrix& projection) {
  if (projection.cols() != h.size() + ctx.size()) {
    throw ContractError("projection expects " +
                        std::to_string(projection.cols()) +
                        " inputs, got " +
                        std::to_string(h.size() + ctx.size()));
  }
  RequireFinite(projection, "projection");

  std::vector<double> out(projection.rows(), 0.0);
  for (std::size_t r = 0; r < projection.rows(); ++r) {
    const auto w = projection.row(r);
    double acc = 0;
    for (std::size_t c = 0; c < h.size(); ++c) acc += w[c] * h[c];
    for (std::size_t c = 0; c < ctx.size(); ++c)
      acc += w[h.size() + c] * ctx[c];
    out[r] = acc;
  }
  return out;
}

Matrix AssembleBlockRepresentation(std::span<const double> projected,
                                   const Matrix& tag_embedding) {
  if (projected.empty()) throw ContractError("empty projected embedding");
  if (tag_embedding.rows() > 0 && tag_embedding.cols() != projected.size()) {
    throw ContractError("tag embedding width differs from projected width");
  }
  Matrix out(1 + tag_embedding.rows(), projected.size());
  std::copy(projected.begin(), projected.end(), out.row(0).begin());
  for (std::size_t r = 0; r < tag_embedding.rows(); ++r) {
    const auto src = tag_embedding.row(r);
    std::copy(src.begin(), src.end(), out.row(r + 1).begin());
  }
  return out;
}

LossBatch MakeInBatchLoss(const Matrix& scores,
                          std::span<const std::vector<std::size_t>> positives,
                          double tau) {
  if (positives.size() != scores.rows()) {
    throw ContractError("one positive set per query is required");
  }
  LossBatch batch;
  batch.tau = tau;
  for (std::size_t k = 0; k < scores.rows(); ++k) {
    std::vector<bool> is_positive(scores.cols(), false);
    for (std::size_t col : positives[k]) {
      if (col >= scores.cols()) {
        throw ContractError("positive index outside the batch block set");
      }
      is_positive[col] = true;
    }
    QueryScores q;
    for (std::size_t col = 0; col < scores.cols(); ++col) {
      (is_positive[col] ? q.positives : q.negatives).push_back(scores(k, col));
    }
    batch.queries.push_back(std::move(q));
  }
  return batch;
}

double ContrastiveLoss(const LossBatch& batch) {
  ValidateBatch(batch);
  double total = 0;
  for (const QueryScores& q : batch.queries) total += Scale(q, batch.tau).loss;
  return total / static_cast<double>(batch.queries.size());
}

std::vector<QueryScores> ContrastiveLossGradient(const LossBatch& batch) {
  ValidateBatch(batch);
  const double coeff =
      1.0 / (static_cast<double>(batch.queries.size()) * batch.tau);
  std::vector<QueryScores> grads;
  grads.reserve(batch.queries.size());
  for (const QueryScores& q : batch.queries) {
    const ScaledQuery s = Scale(q, batch.tau);
    // dL/dx_j = -sigma * softmax_pos(x)_j for positives and
    // sigma * softmax_neg(x)_j for negatives.
    QueryScores g;
    g.positives.reserve(s.pos.size());
    g.negatives.reserve(s.neg.size());
    for (double x : s.pos) {
      g.positives.push_back(-coeff * s.sigma * std::exp(x - s.log_z_pos));
    }
    for (double x : s.neg) {
      g.negatives.push_back(coeff * s.sigma * std::exp(x - s.log_z_neg));
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

}  // namespace layoutret
