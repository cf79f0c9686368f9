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

#include "layoutret/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "layoutret/error.hpp"

namespace layoutret {

MultiVector::MultiVector(std::size_t rows, std::size_t dim,
                         std::vector<float> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
  if (values_.size() != rows_ * dim_) {
    throw ContractError("multi-vector buffer does not match " +
                        std::to_string(rows_) + "x" + std::to_string(dim_));
  }
}

bool MultiVector::Finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](float v) { return std::isfinite(v); });
}

MultiVector MultiVector::Normalized() const {
  std::vector<float> out(values_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto src = row(r);
    double norm = 0;
    for (float v : src) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    for (std::size_t c = 0; c < dim_; ++c) {
      out[r * dim_ + c] =
          norm > 0 ? static_cast<float>(src[c] / norm) : 0.0f;
    }
  }
  return MultiVector(rows_, dim_, std::move(out));
}

double MaxSim(const MultiVector& query, const MultiVector& block) {
  if (query.dim() != block.dim()) {
    throw ContractError("MaxSim dimension mismatch: " +
                        std::to_string(query.dim()) + " vs " +
                        std::to_string(block.dim()));
  }
  const std::size_t dim = query.dim();
  const float* q = query.values().data();
  const float* b = block.values().data();
  double total = 0;
  for (std::size_t i = 0; i < query.rows(); ++i) {
    const float* qi = q + i * dim;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < block.rows(); ++j) {
      const float* bj = b + j * dim;
      double dot = 0;
      for (std::size_t c = 0; c < dim; ++c) {
        dot += static_cast<double>(qi[c]) * static_cast<double>(bj[c]);
      }
      best = std::max(best, dot);
    }
    total += best;
  }
  return total;
}

BlockIndex::BlockIndex(std::size_t dim, IndexOptions options)
    : dim_(dim), options_(options) {
  if (dim_ == 0) throw ContractError("index dimension must be positive");
}

void BlockIndex::Add(IndexEntry entry) {
  if (sealed_) throw ContractError("index is sealed");
  if (entry.block_id.empty()) throw ContractError("empty block id");
  if (entry.page_id.empty()) {
    throw ContractError("block '" + entry.block_id + "' has an empty page id");
  }
  if (entry.vectors.dim() != dim_) {
    throw ContractError("block '" + entry.block_id + "' has dimension " +
                        std::to_string(entry.vectors.dim()) +
                        ", index expects " + std::to_string(dim_));
  }
  if (entry.vectors.rows() == 0) {
    throw ContractError("block '" + entry.block_id + "' has no vectors");
  }
  if (!entry.vectors.Finite()) {
    throw ContractError("block '" + entry.block_id + "' has non-finite values");
  }
  if (by_id_.contains(entry.block_id)) {
    throw ValidationError("duplicate block id '" + entry.block_id + "'");
  }
  if (entry.doc_id.empty()) entry.doc_id = entry.page_id;
  if (options_.normalize) entry.vectors = entry.vectors.Normalized();
  by_id_.emplace(entry.block_id, entries_.size());
  entries_.push_back(std::move(entry));
}

const IndexEntry* BlockIndex::Find(const std::string& block_id) const {
  auto it = by_id_.find(block_id);
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

MultiVector BlockIndex::PrepareQuery(const MultiVector& query) const {
  if (query.dim() != dim_) {
    throw ContractError("query dimension " + std::to_string(query.dim()) +
                        " differs from index dimension " +
                        std::to_string(dim_));
  }
  if (query.rows() == 0) throw ContractError("query has no vectors");
  return options_.normalize ? query.Normalized() : query;
}

std::vector<double> BlockIndex::ScoreAllSerial(
    const MultiVector& query) const {
  const MultiVector q = PrepareQuery(query);
  std::vector<double> scores(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    scores[i] = MaxSim(q, entries_[i].vectors);
  }
  return scores;
}

std::vector<double> BlockIndex::ScoreAll(const MultiVector& query) const {
  const MultiVector q = PrepareQuery(query);
  const auto n = static_cast<std::int64_t>(entries_.size());
  std::vector<double> scores(entries_.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    scores[i] = MaxSim(q, entries_[i].vectors);
  }
  return scores;
}

SearchResult BlockIndex::RankBlocks(std::span<const double> scores,
                                    std::size_t k) const {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto before = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return entries_[a].block_id < entries_[b].block_id;
  };
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(), before);

  SearchResult result;
  result.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const IndexEntry& e = entries_[order[r]];
    result.push_back({e.block_id, e.page_id, scores[order[r]], e.token_cost});
  }
  return result;
}

SearchResult BlockIndex::SearchTopK(const MultiVector& query,
                                    std::size_t k) const {
  if (k == 0) throw ContractError("k must be at least 1");
  if (entries_.empty()) return {};
  return RankBlocks(ScoreAll(query), k);
}

std::map<std::string, double> BlockIndex::PageMaxima(
    std::span<const double> scores) const {
  std::map<std::string, double> pages;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const IndexEntry& e = entries_[i];
    if (e.auxiliary() && !options_.auxiliary_in_pages) continue;
    auto [it, inserted] = pages.try_emplace(e.page_id, scores[i]);
    if (!inserted) it->second = std::max(it->second, scores[i]);
  }
  return pages;
}

std::map<std::string, double> BlockIndex::PageScores(
    const MultiVector& query) const {
  if (entries_.empty()) return {};
  return PageMaxima(ScoreAll(query));
}

std::vector<PageHit> BlockIndex::RankPages(const MultiVector& query,
                                           std::size_t k) const {
  if (k == 0) throw ContractError("k must be at least 1");
  std::vector<PageHit> pages;
  for (const auto& [page_id, score] : PageScores(query)) {
    pages.push_back({page_id, score});
  }
  const auto before = [](const PageHit& a, const PageHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.page_id < b.page_id;
  };
  const std::size_t take = std::min(k, pages.size());
  std::partial_sort(pages.begin(), pages.begin() + take, pages.end(), before);
  pages.resize(take);
  return pages;
}

GenerationContext BlockIndex::RetrieveForGeneration(const MultiVector& query,
                                                    std::size_t k) const {
  GenerationContext ctx;
  ctx.blocks = SearchTopK(query, k);
  for (const SearchHit& hit : ctx.blocks) ctx.total_token_cost += hit.token_cost;
  return ctx;
}

void SetThreadCount(int n) {
#if defined(_OPENMP)
  omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#else
  (void)n;
#endif
}

int ThreadCount() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace layoutret
