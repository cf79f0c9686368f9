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

#ifndef LAYOUTRET_INDEX_HPP_
#define LAYOUTRET_INDEX_HPP_

// Exhaustive late-interaction index over block multi-vectors.
//
// Scoring a query against the corpus is embarrassingly parallel over blocks;
// ScoreAll fans the MaxSim evaluations out with OpenMP while ScoreAllSerial
// keeps the plain loop as a reference. Both produce bit-identical scores
// because each block's score is computed by the same sequential kernel, so
// rankings never depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "layoutret/geometry.hpp"

namespace layoutret {

// N x D token embeddings stored as float32, row-major.
class MultiVector {
 public:
  MultiVector() = default;
  MultiVector(std::size_t rows, std::size_t dim, std::vector<float> values);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  std::span<const float> row(std::size_t r) const {
    return {values_.data() + r * dim_, dim_};
  }
  std::span<const float> values() const { return values_; }

  bool Finite() const;

  // Copy with every row scaled to unit L2 norm (zero rows stay zero).
  MultiVector Normalized() const;

  friend bool operator==(const MultiVector&, const MultiVector&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

// sum_i max_j <q_i, b_j>, accumulated in double: query tokens in order, each
// dot product summed over dimensions in order.
double MaxSim(const MultiVector& query, const MultiVector& block);

struct IndexEntry {
  std::string block_id;
  std::string page_id;
  std::string doc_id;
  LayoutTag tag = LayoutTag::kPlainText;
  MultiVector vectors;
  std::uint32_t token_cost = 0;

  bool auxiliary() const { return tag == LayoutTag::kMaskedPage; }
};

struct SearchHit {
  std::string block_id;
  std::string page_id;
  double score = 0;
  std::uint32_t token_cost = 0;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Ranked by score descending, then block_id ascending.
using SearchResult = std::vector<SearchHit>;

struct PageHit {
  std::string page_id;
  double score = 0;

  friend bool operator==(const PageHit&, const PageHit&) = default;
};

struct GenerationContext {
  SearchResult blocks;
  std::uint64_t total_token_cost = 0;
};

struct IndexOptions {
  // L2-normalize every stored and query token before scoring.
  bool normalize = false;
  // Let the auxiliary masked-page block take part in page-level maxima.
  bool auxiliary_in_pages = true;
};

class BlockIndex {
 public:
  explicit BlockIndex(std::size_t dim, IndexOptions options = {});

  // Throws ValidationError on a duplicate block id and ContractError on a
  // dimension mismatch, empty id, empty multi-vector or a sealed index.
  void Add(IndexEntry entry);

  // Ends the build phase. A sealed index is immutable and safe to query from
  // any number of threads.
  void Seal() { sealed_ = true; }
  bool sealed() const { return sealed_; }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const IndexOptions& options() const { return options_; }
  std::span<const IndexEntry> entries() const { return entries_; }
  const IndexEntry* Find(const std::string& block_id) const;

  // MaxSim of the query against every entry, in entry order.
  std::vector<double> ScoreAll(const MultiVector& query) const;
  std::vector<double> ScoreAllSerial(const MultiVector& query) const;

  // k highest-scoring blocks; ties broken by block_id ascending. k larger
  // than the corpus ranks everything; an empty index gives an empty result.
  SearchResult SearchTopK(const MultiVector& query, std::size_t k) const;

  // Page score = max over the page's block scores.
  std::map<std::string, double> PageScores(const MultiVector& query) const;

  // Pages ranked by score descending, then page_id ascending.
  std::vector<PageHit> RankPages(const MultiVector& query,
                                 std::size_t k) const;

  GenerationContext RetrieveForGeneration(const MultiVector& query,
                                          std::size_t k) const;

 private:
  MultiVector PrepareQuery(const MultiVector& query) const;
  SearchResult RankBlocks(std::span<const double> scores,
                          std::size_t k) const;
  std::map<std::string, double> PageMaxima(
      std::span<const double> scores) const;

  std::size_t dim_;
  IndexOptions options_;
  bool sealed_ = false;
  std::vector<IndexEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// Sets the OpenMP team size used by the parallel kernels; n == 0 restores
// the runtime default.
void SetThreadCount(int n);
int ThreadCount();

}  // namespace layoutret

#endif  // LAYOUTRET_INDEX_HPP_
