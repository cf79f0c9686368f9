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

#include "layoutret/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>

#include "layoutret/error.hpp"

namespace layoutret {
namespace {

// Byte length of the whitespace code point starting at text[i], 0 if none.
std::size_t WhitespaceAt(std::string_view text, std::size_t i) {
  const auto byte = [&](std::size_t k) -> unsigned {
    return i + k < text.size() ? static_cast<unsigned char>(text[i + k]) : 0u;
  };
  const unsigned b0 = byte(0);
  if (b0 == ' ' || (b0 >= '\t' && b0 <= '\r')) return 1;
  if (b0 == 0xC2 && (byte(1) == 0x85 || byte(1) == 0xA0)) return 2;
  if (b0 == 0xE1 && byte(1) == 0x9A && byte(2) == 0x80) return 3;  // U+1680
  if (b0 == 0xE2 && byte(1) == 0x80) {
    const unsigned b2 = byte(2);
    // U+2000..U+200A, U+2028, U+2029, U+202F
    if ((b2 >= 0x80 && b2 <= 0x8A) || b2 == 0xA8 || b2 == 0xA9 || b2 == 0xAF)
      return 3;
  }
  if (b0 == 0xE2 && byte(1) == 0x81 && byte(2) == 0x9F) return 3;  // U+205F
  if (b0 == 0xE3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;  // U+3000
  return 0;
}

bool IsAsciiPunct(char c) {
  return static_cast<unsigned char>(c) < 0x80 &&
         std::ispunct(static_cast<unsigned char>(c));
}

void PushToken(std::string_view raw, std::vector<std::string>& out) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  while (b < e && IsAsciiPunct(raw[b])) ++b;
  while (e > b && IsAsciiPunct(raw[e - 1])) --e;
  if (b == e) return;
  std::string token(raw.substr(b, e - b));
  for (char& c : token) {
    if (static_cast<unsigned char>(c) < 0x80)
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  out.push_back(std::move(token));
}

void CheckRankingArgs(std::span<const std::string> ranked,
                      std::span<const std::string> gold) {
  if (gold.empty()) throw ContractError("gold set is empty");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ranked) {
    if (!seen.insert(id).second) {
      throw ContractError("ranked list repeats id '" + id + "'");
    }
  }
}

std::size_t GoldHitsInTopK(std::span<const std::string> ranked,
                           const std::unordered_set<std::string_view>& gold,
                           std::size_t k, std::vector<bool>* hit_at = nullptr) {
  std::size_t hits = 0;
  const std::size_t depth = std::min(k, ranked.size());
  for (std::size_t r = 0; r < depth; ++r) {
    const bool hit = gold.contains(ranked[r]);
    if (hit_at) hit_at->push_back(hit);
    hits += hit ? 1 : 0;
  }
  return hits;
}

double Mean(std::span<const double> xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (const std::size_t ws = WhitespaceAt(text, i); ws > 0) {
      if (i > start) PushToken(text.substr(start, i - start), tokens);
      i += ws;
      start = i;
    } else {
      ++i;
    }
  }
  if (start < text.size()) PushToken(text.substr(start), tokens);
  return tokens;
}

std::size_t LcsLength(std::span<const std::string> a,
                      std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  // Two rolling rows over the shorter sequence.
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double NdcgAtK(std::span<const std::string> ranked,
               std::span<const std::string> gold, std::size_t k) {
  CheckRankingArgs(ranked, gold);
  const std::unordered_set<std::string_view> gold_set(gold.begin(), gold.end());
  std::vector<bool> hit_at;
  GoldHitsInTopK(ranked, gold_set, k, &hit_at);
  double dcg = 0;
  for (std::size_t r = 0; r < hit_at.size(); ++r) {
    if (hit_at[r]) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  double ideal = 0;
  const std::size_t ideal_hits = std::min(gold_set.size(), k);
  for (std::size_t r = 0; r < ideal_hits; ++r) {
    ideal += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  return ideal > 0 ? dcg / ideal : 0.0;
}

double RecallAtK(std::span<const std::string> ranked,
                 std::span<const std::string> gold, std::size_t k) {
  CheckRankingArgs(ranked, gold);
  const std::unordered_set<std::string_view> gold_set(gold.begin(), gold.end());
  return static_cast<double>(GoldHitsInTopK(ranked, gold_set, k)) /
         static_cast<double>(gold_set.size());
}

double RougeL(std::string_view candidate, std::string_view reference,
              double beta) {
  if (!(beta > 0)) throw ContractError("ROUGE-L beta must be positive");
  const auto cand = Tokenize(candidate);
  const auto ref = Tokenize(reference);
  if (cand.empty() && ref.empty()) return 1.0;
  if (cand.empty() || ref.empty()) return 0.0;
  const double lcs = static_cast<double>(LcsLength(cand, ref));
  if (lcs == 0) return 0.0;
  const double p = lcs / static_cast<double>(cand.size());
  const double r = lcs / static_cast<double>(ref.size());
  const double b2 = beta * beta;
  return (1 + b2) * p * r / (r + b2 * p);
}

double Anlcs(std::string_view retrieved, std::string_view gold) {
  const auto gold_tokens = Tokenize(gold);
  if (gold_tokens.empty()) throw ContractError("ANLCS gold text is empty");
  const auto ret_tokens = Tokenize(retrieved);
  return static_cast<double>(LcsLength(gold_tokens, ret_tokens)) /
         static_cast<double>(gold_tokens.size());
}

double WordOverlapF1(std::string_view candidate, std::string_view reference) {
  const auto cand = Tokenize(candidate);
  const auto ref = Tokenize(reference);
  if (cand.empty() && ref.empty()) return 1.0;
  if (cand.empty() || ref.empty()) return 0.0;
  std::unordered_map<std::string_view, std::size_t> ref_counts;
  for (const auto& t : ref) ++ref_counts[t];
  std::size_t overlap = 0;
  for (const auto& t : cand) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(cand.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(ref.size());
  return 2 * p * r / (p + r);
}

namespace {

struct SampleScores {
  std::vector<double> block_ndcg, block_recall, page_ndcg, page_recall;
  bool has_blocks = false;
  bool has_pages = false;
  std::optional<double> rouge_l, word_f1, anlcs, judge;
  std::optional<double> tokens, page_tokens;
};

std::vector<std::string> BlockIds(const SearchResult& hits) {
  std::vector<std::string> ids;
  ids.reserve(hits.size());
  for (const auto& h : hits) ids.push_back(h.block_id);
  return ids;
}

std::vector<std::string> PageIds(const std::vector<PageHit>& hits) {
  std::vector<std::string> ids;
  ids.reserve(hits.size());
  for (const auto& h : hits) ids.push_back(h.page_id);
  return ids;
}

SampleScores ScoreSample(const EvalSample& sample, const QueryRun& run,
                         const EvalCorpus& corpus,
                         const EvalOptions& options) {
  SampleScores s;
  if (run.blocks) {
    s.has_blocks = true;
    const auto ids = BlockIds(*run.blocks);
    for (std::size_t k : options.ks) {
      s.block_ndcg.push_back(NdcgAtK(ids, sample.gold_block_ids, k));
      s.block_recall.push_back(RecallAtK(ids, sample.gold_block_ids, k));
    }
    const std::size_t depth =
        std::min(options.generation_k, run.blocks->size());
    double tokens = 0;
    std::string retrieved_text;
    for (std::size_t r = 0; r < depth; ++r) {
      const SearchHit& hit = (*run.blocks)[r];
      tokens += hit.token_cost;
      if (auto it = corpus.block_text.find(hit.block_id);
          it != corpus.block_text.end()) {
        if (!retrieved_text.empty()) retrieved_text += '\n';
        retrieved_text += it->second;
      }
    }
    s.tokens = tokens;

    std::string gold_text;
    for (const auto& id : sample.gold_block_ids) {
      if (auto it = corpus.block_text.find(id); it != corpus.block_text.end()) {
        if (!gold_text.empty()) gold_text += '\n';
        gold_text += it->second;
      }
    }
    if (!Tokenize(gold_text).empty()) s.anlcs = Anlcs(retrieved_text, gold_text);
  }
  if (run.pages) {
    s.has_pages = true;
    const auto ids = PageIds(*run.pages);
    const std::vector<std::string> gold = {sample.gold_page_id};
    for (std::size_t k : options.ks) {
      s.page_ndcg.push_back(NdcgAtK(ids, gold, k));
      s.page_recall.push_back(RecallAtK(ids, gold, k));
    }
    if (!corpus.page_token_cost.empty()) {
      const std::size_t depth = std::min(options.generation_k, ids.size());
      double tokens = 0;
      for (std::size_t r = 0; r < depth; ++r) {
        auto it = corpus.page_token_cost.find(ids[r]);
        if (it == corpus.page_token_cost.end()) {
          throw ContractError("no token cost for page '" + ids[r] +
                              "' (query '" + sample.query_id + "')");
        }
        tokens += it->second;
      }
      s.page_tokens = tokens;
    }
  }
  if (run.generated_answer) {
    s.rouge_l =
        RougeL(*run.generated_answer, sample.answer_text, options.rouge_beta);
    s.word_f1 = WordOverlapF1(*run.generated_answer, sample.answer_text);
  }
  s.judge = run.judge_score;
  return s;
}

}  // namespace

MetricReport EvaluateRun(std::span<const EvalSample> samples,
                         std::span<const QueryRun> runs,
                         const EvalCorpus& corpus,
                         const EvalOptions& options) {
  if (options.ks.empty()) throw ContractError("no cutoffs configured");
  for (std::size_t k : options.ks) {
    if (k == 0) throw ContractError("cutoff k must be at least 1");
  }

  std::unordered_map<std::string_view, const QueryRun*> run_by_id;
  for (const QueryRun& run : runs) {
    if (!run_by_id.emplace(run.query_id, &run).second) {
      throw ContractError("duplicate result for query '" + run.query_id + "'");
    }
  }
  // Reduction order: query_id ascending.
  std::vector<const EvalSample*> ordered;
  ordered.reserve(samples.size());
  std::unordered_set<std::string_view> sample_ids;
  for (const EvalSample& s : samples) {
    if (!sample_ids.insert(s.query_id).second) {
      throw ContractError("duplicate sample for query '" + s.query_id + "'");
    }
    if (!run_by_id.contains(s.query_id)) {
      throw ContractError("no result for query '" + s.query_id + "'");
    }
    ordered.push_back(&s);
  }
  for (const QueryRun& run : runs) {
    if (!sample_ids.contains(run.query_id)) {
      throw ContractError("result for unknown query '" + run.query_id + "'");
    }
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const EvalSample* a, const EvalSample* b) {
              return a->query_id < b->query_id;
            });

  const auto n = static_cast<std::int64_t>(ordered.size());
  std::vector<SampleScores> per_sample(ordered.size());
  std::vector<std::string> failures(ordered.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      per_sample[i] = ScoreSample(*ordered[i], *run_by_id.at(ordered[i]->query_id),
                                  corpus, options);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw ContractError(f);
  }

  MetricReport report;
  report.sample_count = ordered.size();

  const auto level = [&](bool SampleScores::*present,
                         std::vector<double> SampleScores::*ndcg,
                         std::vector<double> SampleScores::*recall)
      -> std::optional<LevelMetrics> {
    LevelMetrics m;
    for (std::size_t ki = 0; ki < options.ks.size(); ++ki) {
      std::vector<double> nd, rc;
      for (const auto& s : per_sample) {
        if (!(s.*present)) continue;
        nd.push_back((s.*ndcg)[ki]);
        rc.push_back((s.*recall)[ki]);
      }
      m.count = nd.size();
      m.ndcg[options.ks[ki]] = Mean(nd);
      m.recall[options.ks[ki]] = Mean(rc);
    }
    if (m.count == 0) return std::nullopt;
    return m;
  };
  report.block_level = level(&SampleScores::has_blocks,
                             &SampleScores::block_ndcg,
                             &SampleScores::block_recall);
  report.page_level = level(&SampleScores::has_pages, &SampleScores::page_ndcg,
                            &SampleScores::page_recall);

  const auto average = [&](std::optional<double> SampleScores::*field,
                           std::size_t* count) -> std::optional<double> {
    std::vector<double> xs;
    for (const auto& s : per_sample) {
      if (s.*field) xs.push_back(*(s.*field));
    }
    if (count) *count = xs.size();
    if (xs.empty()) return std::nullopt;
    return Mean(xs);
  };
  report.rouge_l = average(&SampleScores::rouge_l, &report.generation_count);
  report.word_f1 = average(&SampleScores::word_f1, nullptr);
  report.anlcs = average(&SampleScores::anlcs, &report.anlcs_count);
  report.judge_score = average(&SampleScores::judge, nullptr);
  report.mean_tokens = average(&SampleScores::tokens, nullptr);
  report.mean_page_tokens = average(&SampleScores::page_tokens, nullptr);
  if (report.mean_tokens && report.mean_page_tokens &&
      *report.mean_page_tokens > 0) {
    report.token_reduction = 1.0 - *report.mean_tokens / *report.mean_page_tokens;
  }
  return report;
}

}  // namespace layoutret
