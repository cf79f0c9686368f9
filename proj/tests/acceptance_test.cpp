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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "layoutret/corpus_io.hpp"
#include "layoutret/error.hpp"
#include "layoutret/fusion.hpp"
#include "layoutret/geometry.hpp"
#include "layoutret/index.hpp"
#include "layoutret/metrics.hpp"
#include "layoutret/pipeline.hpp"
#include "layoutret/verify.hpp"
#include "metric_oracles.hpp"

namespace {

using namespace layoutret;
namespace fs = std::filesystem;

const fs::path kData = fs::path(LAYOUTRET_SOURCE_DIR) / "data" / "synthetic20";

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Outcome FromSuite(const verify::SuiteResult& r) {
  Outcome o{r.passed, ""};
  for (const auto& line : r.lines) {
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += line.substr(6);
  }
  return o;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

Outcome AggregationOracle() {
  return FromSuite(verify::RunAggregateSuite(1, 500));
}

Outcome DefaultThresholds() {
  const AggregationConfig agg;
  const RunConfig run;
  const LossBatch batch;
  const bool ok = agg.tau_y == 40.0 && agg.tau_x == 0.7 && agg.tau_o == 0.9 &&
                  run.loss_tau == 0.02 && batch.tau == 0.02 &&
                  kDefaultTemperature == 0.02 && run.top_k == 3 &&
                  run.ToJson()["aggregation"]["tau_y"] == 40.0;
  return {ok, Fmt("tau_y=%g tau_x=%g tau_o=%g", agg.tau_y, agg.tau_x, agg.tau_o) +
                  Fmt(" loss tau=%g top_k=%g", run.loss_tau,
                      static_cast<double>(run.top_k))};
}

Outcome MaxSimExactness() { return FromSuite(verify::RunMaxSimSuite(2)); }

Outcome PageAggregation() {
  std::size_t pages_checked = 0, mismatches = 0;
  verify::Rng rng(70);
  for (int corpus = 0; corpus < 20; ++corpus) {
    const std::size_t dim = 1 + verify::UniformIndex(rng, 24);
    std::vector<IndexEntry> entries;
    const std::size_t blocks = 1 + verify::UniformIndex(rng, 300);
    for (std::size_t b = 0; b < blocks; ++b) {
      IndexEntry e;
      e.page_id = "p" + std::to_string(verify::UniformIndex(rng, 1 + blocks / 3));
      e.block_id = e.page_id + "#" + std::to_string(b);
      e.tag = verify::UniformIndex(rng, 5) == 0 ? LayoutTag::kMaskedPage
                                                 : LayoutTag::kPlainText;
      e.vectors = verify::RandomMultiVector(rng, 1 + verify::UniformIndex(rng, 6), dim);
      entries.push_back(std::move(e));
    }
    for (bool aux : {true, false}) {
      IndexOptions options;
      options.auxiliary_in_pages = aux;
      BlockIndex index(dim, options);
      for (const auto& e : entries) index.Add(e);
      index.Seal();
      for (int q = 0; q < 5; ++q) {
        const auto query = verify::RandomMultiVector(rng, 1 + verify::UniformIndex(rng, 5), dim);
        std::map<std::string, double> oracle;
        for (const auto& e : entries) {
          if (!aux && e.tag == LayoutTag::kMaskedPage) continue;
          const double s = verify::BruteForceMaxSim(query, e.vectors);
          auto it = oracle.find(e.page_id);
          if (it == oracle.end() || s > it->second) oracle[e.page_id] = s;
        }
        const auto got = index.PageScores(query);
        pages_checked += oracle.size();
        if (got != oracle) ++mismatches;
        for (const auto& hit : index.RankPages(query, oracle.size())) {
          if (oracle.at(hit.page_id) != hit.score) ++mismatches;
        }
      }
    }
  }
  // The bundled fixture's real index.
  const BlockIndex index = [] {
    const fs::path dir = fs::temp_directory_path() / "layoutret_acceptance_pages";
    fs::create_directories(dir);
    CmdAggregate(kData / "layout.json", dir / "blocks.json", {});
    CmdIndex(dir / "blocks.json", kData / "block_vectors.lfve",
             kData / "token_costs.json", dir / "index.lfix");
    return ReadIndexFile(dir / "index.lfix");
  }();
  for (const auto& rec : ReadVectorFile(kData / "query_vectors.lfve").records) {
    std::map<std::string, double> oracle;
    for (const auto& e : index.entries()) {
      const double s = verify::BruteForceMaxSim(rec.vectors, e.vectors);
      auto it = oracle.find(e.page_id);
      if (it == oracle.end() || s > it->second) oracle[e.page_id] = s;
    }
    pages_checked += oracle.size();
    if (index.PageScores(rec.vectors) != oracle) ++mismatches;
  }
  return {mismatches == 0,
          Fmt("%g page scores checked, %g mismatches",
              static_cast<double>(pages_checked), static_cast<double>(mismatches))};
}

Outcome LossGradient() {
  const auto r = verify::RunLossSuite(3, 100);
  Outcome o = FromSuite(r);
  o.passed = o.passed && r.max_error < 1e-5;
  return o;
}

Outcome FusionKernels() { return FromSuite(verify::RunFusionSuite(4)); }

Outcome MetricOracles() {
  using namespace oracle;
  verify::Rng rng(71);
  std::size_t ndcg_bad = 0, recall_bad = 0, rouge_bad = 0, anlcs_bad = 0, f1_bad = 0;
  double max_dp_err = 0;
  for (int n = 0; n < 1000; ++n) {
    Tokens pool;
    for (int i = 0; i < 30; ++i) pool.push_back("id" + std::to_string(i));
    std::shuffle(pool.begin(), pool.end(), rng);
    const Tokens ranked(pool.begin(), pool.begin() + verify::UniformIndex(rng, 21));
    std::set<std::string> gold;
    const std::size_t g = 1 + verify::UniformIndex(rng, 4);
    while (gold.size() < g) gold.insert("id" + std::to_string(verify::UniformIndex(rng, 30)));
    const Tokens gold_list(gold.begin(), gold.end());
    for (std::size_t k : {1u, 3u, 5u, 10u}) {
      if (RecallAtK(ranked, gold_list, k) != OracleRecall(ranked, gold, k)) ++recall_bad;
      if (std::abs(NdcgAtK(ranked, gold_list, k) - OracleNdcg(ranked, gold, k)) > 1e-9)
        ++ndcg_bad;
    }
    const Tokens a = RandomWords(rng, 200, 12);
    const Tokens b = RandomWords(rng, 200, 12);
    const double rouge_err = std::abs(RougeL(Join(a), Join(b)) - OracleRouge(a, b));
    max_dp_err = std::max(max_dp_err, rouge_err);
    if (rouge_err > 1e-9) ++rouge_bad;
    if (!b.empty()) {
      const double want = static_cast<double>(OracleLcs(b, a)) / b.size();
      const double err = std::abs(Anlcs(Join(a), Join(b)) - want);
      max_dp_err = std::max(max_dp_err, err);
      if (err > 1e-9) ++anlcs_bad;
    }
    if (WordOverlapF1(Join(a), Join(b)) != OracleF1(a, b)) ++f1_bad;
  }
  const Tokens gold1 = {"g"};
  const bool hand =
      NdcgAtK(Tokens{"g"}, gold1, 1) == 1.0 &&
      std::abs(NdcgAtK(Tokens{"x", "g", "y"}, gold1, 3) - 0.6309297535714575) < 1e-15 &&
      NdcgAtK(Tokens{"x", "y"}, gold1, 3) == 0.0 &&
      RecallAtK(Tokens{"a", "x", "y"}, Tokens{"a", "b"}, 3) == 0.5 &&
      RougeL("the cat sat", "the cat sat") == 1.0 &&
      std::abs(RougeL("a b c d", "a c d e") - 0.75) < 1e-15 &&
      Anlcs("x a y b c", "a b c") == 1.0 &&
      std::abs(Anlcs("a x c", "a b c") - 2.0 / 3.0) < 1e-15 &&
      Anlcs("p q", "a b c") == 0.0 && WordOverlapF1("a b", "a b") == 1.0 &&
      std::abs(WordOverlapF1("a a b", "a b b") - 2.0 / 3.0) < 1e-15 &&
      WordOverlapF1("a b", "c d") == 0.0;
  const std::size_t bad = ndcg_bad + recall_bad + rouge_bad + anlcs_bad + f1_bad;
  std::ostringstream d;
  d << "1000 fuzzed cases per metric; mismatches ndcg " << ndcg_bad << ", recall "
    << recall_bad << ", rouge-l " << rouge_bad << ", anlcs " << anlcs_bad
    << ", word-f1 " << f1_bad << Fmt("; max DP error %.1e", max_dp_err)
    << "; hand cases " << (hand ? "ok" : "FAILED");
  return {bad == 0 && hand, d.str()};
}

template <typename F>
bool NamedRejection(F&& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return std::string(e.what()).size() > 0;
  } catch (const ValidationError& e) {
    return std::string(e.what()).size() > 0;
  }
  return true;  // a mutation may leave the input valid
}

std::string Mutate(verify::Rng& rng, std::string bytes) {
  const std::size_t edits = 1 + verify::UniformIndex(rng, 4);
  for (std::size_t e = 0; e < edits && !bytes.empty(); ++e) {
    const std::size_t at = verify::UniformIndex(rng, bytes.size());
    switch (verify::UniformIndex(rng, 3)) {
      case 0:
        bytes[at] = static_cast<char>(verify::UniformIndex(rng, 256));
        break;
      case 1:
        bytes.resize(at);
        break;
      default:
        bytes.insert(at, 1, static_cast<char>(verify::UniformIndex(rng, 256)));
    }
  }
  return bytes;
}

Outcome FormatRoundTrips() {
  std::size_t failures = 0;
  verify::Rng rng(72);
  // VectorFile.
  const std::string vec_bytes = ReadFileBytes(kData / "block_vectors.lfve");
  const VectorFile vf = DecodeVectorFile(vec_bytes);
  if (EncodeVectorFile(vf.records, vf.dim) != vec_bytes) ++failures;
  std::vector<VectorRecord> big;
  for (int i = 0; i < 1000; ++i) {
    big.push_back({"r" + std::to_string(i), verify::RandomMultiVector(rng, 1 + i % 7, 16)});
  }
  const std::string big_bytes = EncodeVectorFile(big, 16);
  if (DecodeVectorFile(big_bytes).records != big) ++failures;
  // LFIX.
  const fs::path dir = fs::temp_directory_path() / "layoutret_acceptance_formats";
  fs::create_directories(dir);
  CmdAggregate(kData / "layout.json", dir / "blocks.json", {});
  CmdIndex(dir / "blocks.json", kData / "block_vectors.lfve",
           kData / "token_costs.json", dir / "index.lfix");
  const std::string ix_bytes = ReadFileBytes(dir / "index.lfix");
  if (EncodeIndex(DecodeIndex(ix_bytes)) != ix_bytes) ++failures;
  // Layout and blocks JSON.
  const std::string layout_text = DumpJson(ParseJsonText(ReadFileBytes(kData / "layout.json"), "layout"));
  Json relayout = Json::array();
  for (const auto& p : ParseLayoutDocument(ParseJsonText(layout_text, "layout"))) {
    relayout.push_back(LayoutPageToJson(p));
  }
  if (DumpJson(relayout) != layout_text) ++failures;
  const std::string blocks_text = ReadFileBytes(dir / "blocks.json");
  Json reblocks = Json::array();
  for (const auto& p : ParseBlocksDocument(ParseJsonText(blocks_text, "blocks"))) {
    reblocks.push_back(BlocksPageToJson(p));
  }
  if (DumpJson(reblocks) != blocks_text) ++failures;
  // Manifest.
  const std::string manifest_text = ReadFileBytes(kData / "manifest.json");
  const std::string remanifest = DumpJson(ManifestToJson(LoadManifest(kData / "manifest.json")));
  if (remanifest != manifest_text) ++failures;

  // Counting oracle over the raw manifest JSON.
  const Json raw = ParseJsonText(manifest_text, "manifest");
  double rel = 0;
  for (const Json& s : raw["samples"]) rel += static_cast<double>(s["gold_block_ids"].size());
  const auto stats = ComputeManifestStats(LoadManifest(kData / "manifest.json"));
  if (stats.qa_pairs != raw["samples"].size() || stats.pages != raw["pages"].size() ||
      stats.avg_relevant_blocks != rel / static_cast<double>(raw["samples"].size())) {
    ++failures;
  }

  std::size_t fuzz = 0, crashes = 0;
  const std::string layout_one = DumpJson(LayoutPageToJson(
      ParseLayoutDocument(ParseJsonText(layout_text, "layout"))[0]));
  const std::string manifest_small = [&] {
    Json m = raw;
    m["pages"] = Json::array({raw["pages"][0]});
    Json samples = Json::array();
    for (const Json& s : raw["samples"]) {
      if (s["gold_page_id"] == raw["pages"][0]["page_id"]) samples.push_back(s);
    }
    m["samples"] = samples;
    m.erase("page_token_costs");
    return DumpJson(m);
  }();
  const std::string vec_small =
      EncodeVectorFile(std::span(vf.records).first(3), vf.dim);
  const std::string ix_small = [&] {
    const BlockIndex full = DecodeIndex(ix_bytes);
    BlockIndex part(full.dim());
    for (std::size_t i = 0; i < 4; ++i) part.Add(full.entries()[i]);
    part.Seal();
    return EncodeIndex(part);
  }();
  for (int n = 0; n < 2000; ++n, fuzz += 4) {
    const std::string v = Mutate(rng, vec_small);
    const std::string x = Mutate(rng, ix_small);
    const std::string l = Mutate(rng, layout_one);
    const std::string m = Mutate(rng, manifest_small);
    try {
      if (!NamedRejection([&] { DecodeVectorFile(v); })) ++crashes;
      if (!NamedRejection([&] { DecodeIndex(x); })) ++crashes;
      if (!NamedRejection([&] { ParseLayoutPage(ParseJsonText(l, "layout")); })) ++crashes;
      if (!NamedRejection([&] { ParseManifest(ParseJsonText(m, "manifest"), dir); }))
        ++crashes;
    } catch (...) {
      ++crashes;
    }
  }
  std::ostringstream d;
  d << "LFVE, LFIX, layout, blocks, manifest re-serialization mismatches " << failures
    << "; " << fuzz << " corrupt inputs, " << crashes << " without a named error";
  return {failures == 0 && crashes == 0, d.str()};
}

struct PipelineRun {
  std::map<std::string, std::string> files;
  MetricReport report;
};

PipelineRun RunPipeline(const fs::path& dir, int threads) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  SetThreadCount(threads);
  RunConfig config;
  config.threads = threads;
  CmdAggregate(kData / "layout.json", dir / "blocks.json", config.aggregation);
  CmdIndex(dir / "blocks.json", kData / "block_vectors.lfve",
           kData / "token_costs.json", dir / "index.lfix", config.index);
  CmdSearch(dir / "index.lfix", kData / "query_vectors.lfve", 10, SearchLevel::kBoth,
            dir / "results.json", {}, config.index);
  PipelineRun run;
  run.report = CmdEval(kData / "manifest.json", dir / "results.json",
                       dir / "report.json", config);
  for (const char* f : {"blocks.json", "index.lfix", "results.json", "report.json"}) {
    run.files[f] = ReadFileBytes(dir / f);
  }
  return run;
}

// Recomputes block/page Recall@k and nDCG@k and token means straight from
// the results and manifest JSON.
std::size_t ScriptedOracleMismatches(const PipelineRun& run) {
  const Json manifest = ParseJsonText(ReadFileBytes(kData / "manifest.json"), "m");
  const Json results = ParseJsonText(run.files.at("results.json"), "r");
  const Json report = ParseJsonText(run.files.at("report.json"), "report")["raw"];
  std::map<std::string, const Json*> by_query;
  for (const Json& q : results["queries"]) by_query[q["query_id"]] = &q;
  std::size_t bad = 0;
  const double n = static_cast<double>(manifest["samples"].size());
  for (std::size_t k : {1u, 3u, 5u, 10u}) {
    double br = 0, bn = 0, pr = 0, pn = 0;
    for (const Json& s : manifest["samples"]) {
      const Json& q = *by_query.at(s["query_id"]);
      std::set<std::string> gold;
      for (const Json& g : s["gold_block_ids"]) gold.insert(g);
      double hits = 0, dcg = 0, ideal = 0;
      for (std::size_t r = 0; r < std::min(k, q["blocks"].size()); ++r) {
        if (gold.count(q["blocks"][r]["block_id"])) {
          hits += 1;
          dcg += 1 / std::log2(r + 2.0);
        }
      }
      for (std::size_t r = 0; r < std::min(k, gold.size()); ++r) ideal += 1 / std::log2(r + 2.0);
      br += hits / gold.size();
      bn += dcg / ideal;
      for (std::size_t r = 0; r < std::min(k, q["pages"].size()); ++r) {
        if (q["pages"][r]["page_id"] == s["gold_page_id"]) {
          pr += 1;
          pn += 1 / std::log2(r + 2.0);
        }
      }
    }
    const std::string key = std::to_string(k);
    const auto close = [](double a, double b) { return std::abs(a - b) < 1e-12; };
    if (!close(report["block_level"]["recall"][key].get<double>(), br / n)) ++bad;
    if (!close(report["block_level"]["ndcg"][key].get<double>(), bn / n)) ++bad;
    if (!close(report["page_level"]["recall"][key].get<double>(), pr / n)) ++bad;
    if (!close(report["page_level"]["ndcg"][key].get<double>(), pn / n)) ++bad;
  }
  double block_tokens = 0, page_tokens = 0;
  for (const Json& s : manifest["samples"]) {
    const Json& q = *by_query.at(s["query_id"]);
    for (std::size_t r = 0; r < 3; ++r) {
      block_tokens += q["blocks"][r]["token_cost"].get<double>();
      page_tokens += manifest["page_token_costs"][q["pages"][r]["page_id"].get<std::string>()]
                         .get<double>();
    }
  }
  if (report["tokens"]["mean_block_tokens"].get<double>() != block_tokens / n) ++bad;
  if (report["tokens"]["mean_page_tokens"].get<double>() != page_tokens / n) ++bad;
  return bad;
}

const PipelineRun& ReferenceRun() {
  static const PipelineRun run =
      RunPipeline(fs::temp_directory_path() / "layoutret_acceptance_e2e_ref", 1);
  return run;
}

Outcome EndToEndDeterminism() {
  const PipelineRun& ref = ReferenceRun();
  std::size_t diffs = 0, runs = 0;
  for (int threads : {1, 2, 4, 8}) {
    const PipelineRun again = RunPipeline(
        fs::temp_directory_path() / ("layoutret_acceptance_e2e_" + std::to_string(threads)),
        threads);
    ++runs;
    for (const auto& [name, bytes] : ref.files) diffs += again.files.at(name) != bytes;
  }
  SetThreadCount(0);
  const std::size_t oracle_bad = ScriptedOracleMismatches(ref);
  std::ostringstream d;
  d << runs << " reruns at 1/2/4/8 threads, " << diffs
    << " differing artifacts (blocks, index, results, report); scripted metric oracle "
       "mismatches "
    << oracle_bad;
  return {diffs == 0 && oracle_bad == 0, d.str()};
}

Outcome TokenAccounting() {
  // Every block in the fixture costs a third of its page.
  const Json costs = ParseJsonText(ReadFileBytes(kData / "token_costs.json"), "costs");
  const Json manifest = ParseJsonText(ReadFileBytes(kData / "manifest.json"), "m");
  bool thirds = true;
  for (const auto& [block, cost] : costs.items()) {
    const std::string page = block.substr(0, block.find('#'));
    thirds = thirds && 3 * cost.get<std::uint32_t>() ==
                           manifest["page_token_costs"][page].get<std::uint32_t>();
  }
  const MetricReport& r = ReferenceRun().report;
  const bool ok = thirds && r.token_reduction && *r.token_reduction >= 0.6;
  return {ok, Fmt("block top-3 mean %.1f tokens vs page top-3 mean %.1f; reduction %.4f "
                  "(required >= 0.6)",
                  r.mean_tokens.value_or(0), r.mean_page_tokens.value_or(0),
                  r.token_reduction.value_or(0)) +
                  (thirds ? "" : "; fixture costs are not page thirds")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"aggregation-oracle", AggregationOracle},
      {"default-thresholds", DefaultThresholds},
      {"maxsim-exactness", MaxSimExactness},
      {"page-aggregation", PageAggregation},
      {"loss-gradient", LossGradient},
      {"fusion-kernels", FusionKernels},
      {"metric-oracles", MetricOracles},
      {"format-round-trips", FormatRoundTrips},
      {"end-to-end-determinism", EndToEndDeterminism},
      {"token-accounting", TokenAccounting},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %-24s %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str(), Seconds(start));
    failed += o.passed ? 0 : 1;
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
