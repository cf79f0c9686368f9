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

#ifndef LAYOUTRET_CORPUS_IO_HPP_
#define LAYOUTRET_CORPUS_IO_HPP_

// Readers and writers for every on-disk artifact: LFVE vector files, LFIX
// index files, layout/blocks JSON, search results, benchmark manifests and
// metric reports. Binary formats are little-endian; byte layouts are listed
// in docs/formats.md.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "layoutret/geometry.hpp"
#include "layoutret/index.hpp"
#include "layoutret/metrics.hpp"

namespace layoutret {

using Json = nlohmann::ordered_json;

inline constexpr std::uint32_t kVectorFileVersion = 1;
inline constexpr std::uint32_t kIndexFileVersion = 1;

// ---- raw file helpers ------------------------------------------------------

// Throw IoError when the path cannot be read or written.
std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

// ---- LFVE vector files -----------------------------------------------------

struct VectorRecord {
  std::string id;
  MultiVector vectors;

  friend bool operator==(const VectorRecord&, const VectorRecord&) = default;
};

struct VectorFile {
  std::uint32_t dim = 0;
  std::vector<VectorRecord> records;  // file order

  std::map<std::string, MultiVector> ToMap() const;
};

// Throws ContractError on an id collision, mixed or zero dimension, or an
// empty multi-vector.
std::string EncodeVectorFile(std::span<const VectorRecord> records,
                             std::uint32_t dim);
// Throws FormatError (bad magic, unsupported version, truncated, duplicate
// id, malformed).
VectorFile DecodeVectorFile(std::string_view bytes);

void WriteVectorFile(std::span<const VectorRecord> records, std::uint32_t dim,
                     const std::filesystem::path& path);
VectorFile ReadVectorFile(const std::filesystem::path& path);

// ---- LFIX index files ------------------------------------------------------

std::string EncodeIndex(const BlockIndex& index);
// Returns a sealed index. Throws FormatError.
BlockIndex DecodeIndex(std::string_view bytes, IndexOptions options = {});

void WriteIndexFile(const BlockIndex& index, const std::filesystem::path& path);
BlockIndex ReadIndexFile(const std::filesystem::path& path,
                         IndexOptions options = {});

// ---- layout and blocks JSON ------------------------------------------------

struct PageLayout {
  std::string page_id;
  std::optional<std::string> doc_id;
  double width = 0;
  double height = 0;
  std::vector<Region> regions;

  BBox bounds() const { return {0, 0, width, height}; }
};

struct PageBlocks {
  std::string page_id;
  std::optional<std::string> doc_id;
  double width = 0;
  double height = 0;
  std::vector<Block> blocks;
};

// Corpus-wide id of a block: "<page_id>#<block ordinal>".
std::string GlobalBlockId(std::string_view page_id, int block_id);

// Schema and semantic checks; unknown tags, bad boxes, regions outside the
// page or out of reading order raise ValidationError.
PageLayout ParseLayoutPage(const Json& j);
Json LayoutPageToJson(const PageLayout& page);

PageBlocks ParseBlocksPage(const Json& j);
Json BlocksPageToJson(const PageBlocks& page);

PageBlocks AggregatePage(const PageLayout& page,
                         const AggregationConfig& cfg);

// A document may hold one page object or an array of them.
std::vector<PageLayout> ParseLayoutDocument(const Json& j);
std::vector<PageBlocks> ParseBlocksDocument(const Json& j);

// Parses text, mapping syntax errors to FormatError(kMalformed).
Json ParseJsonText(std::string_view text, std::string_view what);
// Canonical serialization: two-space indent, trailing newline.
std::string DumpJson(const Json& j);

// ---- search results --------------------------------------------------------

Json RunsToJson(std::span<const QueryRun> runs);
std::vector<QueryRun> ParseRuns(const Json& j);

// ---- benchmark manifest ----------------------------------------------------

struct BenchmarkManifest {
  std::string dataset;
  std::vector<PageLayout> layouts;
  std::vector<PageBlocks> pages;  // aggregated, parallel to layouts
  std::map<std::string, std::uint32_t> page_token_costs;
  std::vector<EvalSample> samples;
};

// Validates the whole manifest; the first violation is reported as a
// ValidationError naming the offending id. Pages may be inline layout
// objects or {"path": ...} relative to base_dir.
BenchmarkManifest ParseManifest(const Json& j,
                                const std::filesystem::path& base_dir,
                                const AggregationConfig& cfg = {});
BenchmarkManifest LoadManifest(const std::filesystem::path& path,
                               const AggregationConfig& cfg = {});
// Always writes pages inline.
Json ManifestToJson(const BenchmarkManifest& manifest);

EvalCorpus BuildEvalCorpus(const BenchmarkManifest& manifest);

struct ManifestStats {
  std::size_t qa_pairs = 0;
  std::size_t pages = 0;
  double avg_question_length = 0;  // whitespace tokens
  double avg_answer_length = 0;
  double avg_blocks_per_page = 0;  // content blocks, auxiliary excluded
  double avg_relevant_blocks = 0;  // gold blocks per sample
};

ManifestStats ComputeManifestStats(const BenchmarkManifest& manifest);

// ---- metric report ---------------------------------------------------------

// Human-facing values rounded to 4 decimals, full precision under "raw",
// and the effective configuration under "config".
Json ReportToJson(const MetricReport& report, const EvalOptions& options,
                  const Json& config);

}  // namespace layoutret

#endif  // LAYOUTRET_CORPUS_IO_HPP_
