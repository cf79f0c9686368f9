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

#ifndef LAYOUTRET_PIPELINE_HPP_
#define LAYOUTRET_PIPELINE_HPP_

// The aggregate -> index -> search -> eval pipeline as callable commands.
// The CLI is a thin argument-parsing layer over these.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "layoutret/corpus_io.hpp"
#include "layoutret/fusion.hpp"
#include "layoutret/geometry.hpp"
#include "layoutret/index.hpp"
#include "layoutret/metrics.hpp"

namespace layoutret {

struct RunConfig {
  AggregationConfig aggregation;
  EvalOptions eval;
  std::size_t top_k = 3;
  IndexOptions index;
  double loss_tau = kDefaultTemperature;
  std::string tie_break = "block_id";
  int threads = 0;  // 0: OpenMP default

  // Throws ContractError on the first invalid field.
  void Validate() const;
  Json ToJson() const;
};

enum class SearchLevel { kBlock, kPage, kBoth };

// Layout JSON (one page or an array) -> blocks JSON of the same shape.
void CmdAggregate(const std::filesystem::path& layout_in,
                  const std::filesystem::path& blocks_out,
                  const AggregationConfig& cfg);

// Builds and seals an LFIX index from a blocks JSON and an LFVE file keyed by
// global block id. token_costs, when given, is a JSON object mapping block id
// to token cost. Missing vectors are a ValidationError listing every id.
void CmdIndex(const std::filesystem::path& blocks_json,
              const std::filesystem::path& vectors_file,
              const std::optional<std::filesystem::path>& token_costs,
              const std::filesystem::path& index_out,
              const IndexOptions& options = {});

// Runs every query in the LFVE file (or only query_ids, if non-empty) against
// the index and returns the rankings JSON. Unknown query ids and an empty
// index are ValidationErrors.
Json RunSearch(const std::filesystem::path& index_file,
               const std::filesystem::path& query_vectors, std::size_t k,
               SearchLevel level, const std::vector<std::string>& query_ids = {},
               const IndexOptions& options = {});

// RunSearch written to results_out.
void CmdSearch(const std::filesystem::path& index_file,
               const std::filesystem::path& query_vectors,
               std::size_t k, SearchLevel level,
               const std::filesystem::path& results_out,
               const std::vector<std::string>& query_ids = {},
               const IndexOptions& options = {});

// Scores a results JSON against a manifest and writes the report JSON.
MetricReport CmdEval(const std::filesystem::path& manifest,
                     const std::filesystem::path& results,
                     const std::filesystem::path& report_out,
                     const RunConfig& config);

}  // namespace layoutret

#endif  // LAYOUTRET_PIPELINE_HPP_
