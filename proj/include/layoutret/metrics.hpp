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

#ifndef LAYOUTRET_METRICS_HPP_
#define LAYOUTRET_METRICS_HPP_

// Retrieval metrics (binary-relevance nDCG@k, Recall@k) and text metrics
// (ROUGE-L, ANLCS, word-overlap F1) plus macro-averaging over a run.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "layoutret/index.hpp"

namespace layoutret {

// Lowercases ASCII letters, splits on whitespace (ASCII and the Unicode
// space separators), strips leading/trailing punctuation from each token and
// drops tokens that end up empty. Every text metric tokenizes through here.
std::vector<std::string> Tokenize(std::string_view text);

std::size_t LcsLength(std::span<const std::string> a,
                      std::span<const std::string> b);

// Gold must be non-empty and ranked ids duplicate-free (ContractError).
double NdcgAtK(std::span<const std::string> ranked,
               std::span<const std::string> gold, std::size_t k);
double RecallAtK(std::span<const std::string> ranked,
                 std::span<const std::string> gold, std::size_t k);

// LCS F-measure over word tokens, F = (1+b^2)PR / (R + b^2 P).
double RougeL(std::string_view candidate, std::string_view reference,
              double beta = 1.0);

// LCS(gold, retrieved) / |gold|. Throws ContractError when gold has no
// tokens.
double Anlcs(std::string_view retrieved, std::string_view gold);

// Multiset token overlap F1.
double WordOverlapF1(std::string_view candidate, std::string_view reference);

struct EvalSample {
  std::string query_id;
  std::string query_text;
  std::vector<std::string> gold_block_ids;
  std::string gold_page_id;
  std::string answer_text;
  std::optional<std::uint32_t> page_token_cost;
};

// What a retrieval run produced for one query. Either ranking may be absent;
// metrics for an absent ranking are skipped.
struct QueryRun {
  std::string query_id;
  std::optional<SearchResult> blocks;
  std::optional<std::vector<PageHit>> pages;
  std::optional<std::string> generated_answer;
  std::optional<double> judge_score;
};

struct EvalOptions {
  std::vector<std::size_t> ks = {1, 3, 5, 10};
  std::size_t generation_k = 3;  // blocks/pages handed to the generator
  double rouge_beta = 1.0;
};

// Corpus-side lookups evaluate_run needs beyond the rankings.
struct EvalCorpus {
  std::unordered_map<std::string, std::string> block_text;
  std::unordered_map<std::string, std::uint32_t> page_token_cost;
};

struct LevelMetrics {
  std::map<std::size_t, double> ndcg;
  std::map<std::size_t, double> recall;
  std::size_t count = 0;
};

struct MetricReport {
  std::size_t sample_count = 0;
  std::optional<LevelMetrics> block_level;
  std::optional<LevelMetrics> page_level;
  std::optional<double> rouge_l;
  std::optional<double> word_f1;
  std::size_t generation_count = 0;
  std::optional<double> anlcs;
  std::size_t anlcs_count = 0;
  std::optional<double> judge_score;
  // Mean tokens of the top generation_k blocks per query.
  std::optional<double> mean_tokens;
  // Mean tokens of the top generation_k pages per query.
  std::optional<double> mean_page_tokens;
  // 1 - mean_tokens / mean_page_tokens.
  std::optional<double> token_reduction;
};

// Macro-averages every metric over the samples. Per-sample work may run in
// parallel; reduction happens in query_id order so the report is independent
// of sample order and thread count. Throws ContractError naming the query_id
// when samples and runs do not pair up one to one.
MetricReport EvaluateRun(std::span<const EvalSample> samples,
                         std::span<const QueryRun> runs,
                         const EvalCorpus& corpus,
                         const EvalOptions& options = {});

}  // namespace layoutret

#endif  // LAYOUTRET_METRICS_HPP_
