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

#include "layoutret/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "layoutret/error.hpp"

namespace layoutret {

void RunConfig::Validate() const {
  aggregation.Validate();
  if (top_k == 0) throw ContractError("top_k must be at least 1");
  if (eval.ks.empty()) throw ContractError("metric cutoff list is empty");
  for (std::size_t k : eval.ks) {
    if (k == 0) throw ContractError("metric cutoffs must be at least 1");
  }
  if (eval.generation_k == 0)
    throw ContractError("generation_k must be at least 1");
  if (!(eval.rouge_beta > 0)) throw ContractError("rouge beta must be positive");
  if (!(loss_tau > 0)) throw ContractError("loss temperature must be positive");
  if (tie_break != "block_id") {
    throw ContractError("unsupported tie-break mode '" + tie_break + "'");
  }
  if (threads < 0) throw ContractError("threads must be non-negative");
}

Json RunConfig::ToJson() const {
  Json agg = Json::object();
  agg["tau_x"] = aggregation.tau_x;
  agg["tau_y"] = aggregation.tau_y;
  agg["tau_o"] = aggregation.tau_o;
  agg["delta"] = aggregation.delta;
  agg["exact_tag_match"] = aggregation.exact_tag_match;
  Json priority = Json::array();
  for (LayoutTag t : aggregation.priority) priority.push_back(TagName(t));
  agg["priority"] = std::move(priority);

  Json j = Json::object();
  j["aggregation"] = std::move(agg);
  j["top_k"] = top_k;
  j["normalize"] = index.normalize;
  j["auxiliary_in_pages"] = index.auxiliary_in_pages;
  j["loss_tau"] = loss_tau;
  j["tie_break"] = tie_break;
  return j;
}

void CmdAggregate(const std::filesystem::path& layout_in,
                  const std::filesystem::path& blocks_out,
                  const AggregationConfig& cfg) {
  cfg.Validate();
  const Json in = ParseJsonText(ReadFileBytes(layout_in), layout_in.string());
  const auto layouts = ParseLayoutDocument(in);
  Json out = Json::array();
  for (const PageLayout& page : layouts) {
    out.push_back(BlocksPageToJson(AggregatePage(page, cfg)));
  }
  WriteFileBytes(blocks_out, DumpJson(in.is_array() ? out : out.front()));
}

void CmdIndex(const std::filesystem::path& blocks_json,
              const std::filesystem::path& vectors_file,
              const std::optional<std::filesystem::path>& token_costs,
              const std::filesystem::path& index_out,
              const IndexOptions& options) {
  const auto pages = ParseBlocksDocument(
      ParseJsonText(ReadFileBytes(blocks_json), blocks_json.string()));
  const VectorFile vectors = ReadVectorFile(vectors_file);
  const auto by_id = vectors.ToMap();

  std::map<std::string, std::uint32_t> costs;
  if (token_costs) {
    const Json j =
        ParseJsonText(ReadFileBytes(*token_costs), token_costs->string());
    if (!j.is_object()) {
      throw ValidationError("token costs must be a JSON object");
    }
    for (const auto& [id, cost] : j.items()) {
      if (!cost.is_number_integer() || cost.get<std::int64_t>() < 0 ||
          cost.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max()) {
        throw ValidationError("token cost of '" + id +
                              "' must be a non-negative integer");
      }
      costs[id] = static_cast<std::uint32_t>(cost.get<std::int64_t>());
    }
  }

  std::vector<std::string> missing;
  for (const PageBlocks& page : pages) {
    for (const Block& b : page.blocks) {
      const std::string id = GlobalBlockId(page.page_id, b.id);
      if (!by_id.contains(id)) missing.push_back(id);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw ValidationError("no vectors for blocks: " + list);
  }

  BlockIndex index(vectors.dim, options);
  for (const PageBlocks& page : pages) {
    for (const Block& b : page.blocks) {
      IndexEntry e;
      e.block_id = GlobalBlockId(page.page_id, b.id);
      e.page_id = page.page_id;
      e.doc_id = page.doc_id.value_or(page.page_id);
      e.tag = b.tag;
      e.vectors = by_id.at(e.block_id);
      if (auto it = costs.find(e.block_id); it != costs.end()) {
        e.token_cost = it->second;
      }
      index.Add(std::move(e));
    }
  }
  index.Seal();
  WriteIndexFile(index, index_out);
}

Json RunSearch(const std::filesystem::path& index_file,
               const std::filesystem::path& query_vectors, std::size_t k,
               SearchLevel level, const std::vector<std::string>& query_ids,
               const IndexOptions& options) {
  if (k == 0) throw ContractError("k must be at least 1");
  const BlockIndex index = ReadIndexFile(index_file, options);
  if (index.empty()) throw ValidationError("index '" + index_file.string() +
                                           "' holds no blocks");
  const VectorFile queries = ReadVectorFile(query_vectors);
  if (queries.dim != index.dim()) {
    throw ValidationError("query dimension " + std::to_string(queries.dim) +
                          " differs from index dimension " +
                          std::to_string(index.dim()));
  }

  std::vector<const VectorRecord*> selected;
  if (query_ids.empty()) {
    for (const auto& r : queries.records) selected.push_back(&r);
  } else {
    for (const auto& id : query_ids) {
      auto it = std::find_if(queries.records.begin(), queries.records.end(),
                             [&](const VectorRecord& r) { return r.id == id; });
      if (it == queries.records.end()) {
        throw ValidationError("unknown query id '" + id + "'");
      }
      selected.push_back(&*it);
    }
  }

  std::vector<QueryRun> runs;
  for (const VectorRecord* q : selected) {
    QueryRun run;
    run.query_id = q->id;
    if (level != SearchLevel::kPage) run.blocks = index.SearchTopK(q->vectors, k);
    if (level != SearchLevel::kBlock) run.pages = index.RankPages(q->vectors, k);
    runs.push_back(std::move(run));
  }
  Json out = Json::object();
  out["level"] = level == SearchLevel::kBlock  ? "block"
                 : level == SearchLevel::kPage ? "page"
                                               : "both";
  out["k"] = k;
  out["queries"] = RunsToJson(runs)["queries"];
  return out;
}

void CmdSearch(const std::filesystem::path& index_file,
               const std::filesystem::path& query_vectors, std::size_t k,
               SearchLevel level, const std::filesystem::path& results_out,
               const std::vector<std::string>& query_ids,
               const IndexOptions& options) {
  WriteFileBytes(results_out, DumpJson(RunSearch(index_file, query_vectors, k,
                                                 level, query_ids, options)));
}

MetricReport CmdEval(const std::filesystem::path& manifest_path,
                     const std::filesystem::path& results,
                     const std::filesystem::path& report_out,
                     const RunConfig& config) {
  config.Validate();
  const BenchmarkManifest manifest =
      LoadManifest(manifest_path, config.aggregation);
  const auto runs =
      ParseRuns(ParseJsonText(ReadFileBytes(results), results.string()));
  const MetricReport report = EvaluateRun(
      manifest.samples, runs, BuildEvalCorpus(manifest), config.eval);
  Json cfg = config.ToJson();
  cfg["dataset"] = manifest.dataset;
  WriteFileBytes(report_out, DumpJson(ReportToJson(report, config.eval, cfg)));
  return report;
}

}  // namespace layoutret
