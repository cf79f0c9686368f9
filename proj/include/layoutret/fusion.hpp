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

#ifndef LAYOUTRET_FUSION_HPP_
#define LAYOUTRET_FUSION_HPP_

// Numeric kernels of the semantic-layout fusion encoder and of the
// multi-positive contrastive objective used to train block retrieval.
// Everything is computed in double precision and is free of shared state.

#include <cstddef>
#include <span>
#include <vector>

#include "layoutret/matrix.hpp"

namespace layoutret {

inline constexpr double kDefaultTemperature = 0.02;

// softmax(Q K^T / sqrt(d)) row by row; n x m, every row sums to one.
Matrix AttentionWeights(const Matrix& q, const Matrix& k);

// softmax(Q K^T / sqrt(d)) V for Q (n x d), K (m x d), V (m x d_v).
// Throws ContractError on shape mismatch, m == 0 or non-finite input.
Matrix Attention(const Matrix& q, const Matrix& k, const Matrix& v);

// Cross-attention of the stacked block embeddings (n x d, one row per block)
// against the page's global tokens (m x d), which serve as both keys and
// values. Returns one context row per block; n == 0 yields an empty result.
Matrix Contextualize(const Matrix& block_embeddings, const Matrix& global);

// projection * (h || ctx). projection.cols() must equal |h| + |ctx|.
std::vector<double> FuseAndProject(std::span<const double> h,
                                   std::span<const double> ctx,
                                   const Matrix& projection);

// Stacks the projected visual row above the tag-embedding rows, giving the
// block's multi-vector representation (1 + tag.rows()) x D.
Matrix AssembleBlockRepresentation(std::span<const double> projected,
                                   const Matrix& tag_embedding);

struct QueryScores {
  std::vector<double> positives;
  std::vector<double> negatives;
};

struct LossBatch {
  std::vector<QueryScores> queries;
  double tau = kDefaultTemperature;
};

// Splits a b x |batch| score matrix into per-query positive/negative lists:
// positives[k] holds the column indices relevant to query k, every other
// column of the batch is a negative for it.
LossBatch MakeInBatchLoss(const Matrix& scores,
                          std::span<const std::vector<std::size_t>> positives,
                          double tau = kDefaultTemperature);

// -(1/b) sum_k log( sum_pos e^{s/tau} / sum_all e^{s/tau} ), evaluated with
// per-query log-sum-exp. Throws ContractError if tau <= 0, the batch is
// empty, or a query has no positive.
double ContrastiveLoss(const LossBatch& batch);

// dL/ds for every score, laid out like the batch.
std::vector<QueryScores> ContrastiveLossGradient(const LossBatch& batch);

}  // namespace layoutret

#endif  // LAYOUTRET_FUSION_HPP_
