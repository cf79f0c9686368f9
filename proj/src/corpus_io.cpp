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

#include "layoutret/corpus_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "layoutret/error.hpp"

namespace layoutret {
namespace {

constexpr std::string_view kVectorMagic = "LFVE";
constexpr std::string_view kIndexMagic = "LFIX";

class ByteWriter {
 public:
  void Raw(std::string_view s) { out_.append(s); }
  void U16(std::uint16_t v) { Int(v, 2); }
  void U32(std::uint32_t v) { Int(v, 4); }
  void U64(std::uint64_t v) { Int(v, 8); }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void String16(std::string_view s) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ContractError("string longer than 65535 bytes");
    }
    U16(static_cast<std::uint16_t>(s.size()));
    Raw(s);
  }
  std::string Take() { return std::move(out_); }

 private:
  void Int(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
  }
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::string_view Raw(std::size_t n, const char* what) {
    if (remaining() < n) {
      throw FormatError(FormatErrorKind::kTruncated,
                        std::string("while reading ") + what);
    }
    std::string_view s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint16_t U16(const char* what) {
    return static_cast<std::uint16_t>(Int(2, what));
  }
  std::uint32_t U32(const char* what) {
    return static_cast<std::uint32_t>(Int(4, what));
  }
  std::uint64_t U64(const char* what) { return Int(8, what); }
  std::string String16(const char* what) {
    const std::uint16_t len = U16(what);
    return std::string(Raw(len, what));
  }
  std::vector<float> Floats(std::uint64_t count, const char* what) {
    if (count > remaining() / 4) {
      throw FormatError(FormatErrorKind::kTruncated,
                        std::string("while reading ") + what);
    }
    std::vector<float> out(count);
    for (auto& v : out) v = std::bit_cast<float>(U32(what));
    return out;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::uint64_t Int(int bytes, const char* what) {
    const std::string_view s = Raw(static_cast<std::size_t>(bytes), what);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[i]))
           << (8 * i);
    }
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

void ExpectMagic(ByteReader& in, std::string_view magic) {
  if (in.remaining() < magic.size()) {
    throw FormatError(FormatErrorKind::kBadMagic,
                      "expected '" + std::string(magic) + "'");
  }
  if (in.Raw(magic.size(), "magic") != magic) {
    throw FormatError(FormatErrorKind::kBadMagic,
                      "expected '" + std::string(magic) + "'");
  }
}

MultiVector ReadMultiVector(ByteReader& in, std::uint32_t dim,
                            const std::string& id) {
  const std::uint32_t rows = in.U32("token count");
  if (rows == 0) {
    throw FormatError(FormatErrorKind::kMalformed,
                      "entry '" + id + "' has no vectors");
  }
  std::vector<float> values =
      in.Floats(static_cast<std::uint64_t>(rows) * dim, "vector payload");
  return MultiVector(rows, dim, std::move(values));
}

// ---- JSON field access -----------------------------------------------------

const Json& Field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) {
    throw ValidationError(where + ": expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  return *it;
}

std::string StringField(const Json& obj, const char* key,
                        const std::string& where) {
  const Json& v = Field(obj, key, where);
  if (!v.is_string()) {
    throw ValidationError(where + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

double NumberField(const Json& obj, const char* key, const std::string& where) {
  const Json& v = Field(obj, key, where);
  if (!v.is_number()) {
    throw ValidationError(where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

std::uint32_t CountValue(const Json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
      v.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError(where + ": expected a non-negative 32-bit integer");
  }
  return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

std::optional<std::string> OptionalString(const Json& obj, const char* key,
                                          const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw ValidationError(where + ": field '" + key +
                          "' must be a string or null");
  }
  return it->get<std::string>();
}

const Json& ArrayField(const Json& obj, const char* key,
                       const std::string& where) {
  const Json& v = Field(obj, key, where);
  if (!v.is_array()) {
    throw ValidationError(where + ": field '" + key + "' must be an array");
  }
  return v;
}

BBox ParseBox(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4 ||
      !std::all_of(v.begin(), v.end(),
                   [](const Json& x) { return x.is_number(); })) {
    throw ValidationError(where + ": bbox must be [x1, y1, x2, y2]");
  }
  BBox b{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
         v[3].get<double>()};
  if (!b.valid()) {
    throw ValidationError(where + ": bbox needs 0 <= x1 < x2 and 0 <= y1 < y2");
  }
  return b;
}

Json BoxToJson(const BBox& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

void ParsePageHeader(const Json& j, std::string* page_id,
                     std::optional<std::string>* doc_id, double* width,
                     double* height) {
  if (!j.is_object()) throw ValidationError("page: expected an object");
  *page_id = StringField(j, "page_id", "page");
  const std::string where = "page '" + *page_id + "'";
  if (page_id->empty()) throw ValidationError("page: empty page_id");
  *doc_id = OptionalString(j, "doc_id", where);
  *width = NumberField(j, "width", where);
  *height = NumberField(j, "height", where);
  if (!(*width > 0) || !(*height > 0) || !std::isfinite(*width) ||
      !std::isfinite(*height)) {
    throw ValidationError(where + ": width and height must be positive");
  }
}

void WritePageHeader(Json& j, const std::string& page_id,
                     const std::optional<std::string>& doc_id, double width,
                     double height) {
  j["page_id"] = page_id;
  if (doc_id) j["doc_id"] = *doc_id;
  j["width"] = width;
  j["height"] = height;
}

Json OptionalText(const std::optional<std::string>& text) {
  return text ? Json(*text) : Json(nullptr);
}

double Round4(double x) { return std::round(x * 1e4) / 1e4; }

}  // namespace

// ---- raw files ---------------------------------------------------------------

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return data;
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

// ---- LFVE ----------------------------------------------------------------------

std::map<std::string, MultiVector> VectorFile::ToMap() const {
  std::map<std::string, MultiVector> out;
  for (const auto& r : records) out.emplace(r.id, r.vectors);
  return out;
}

std::string EncodeVectorFile(std::span<const VectorRecord> records,
                             std::uint32_t dim) {
  if (dim == 0) throw ContractError("vector file dimension must be positive");
  if (records.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ContractError("too many vector records");
  }
  std::unordered_set<std::string_view> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) {
      throw ContractError("duplicate vector id '" + r.id + "'");
    }
    if (r.vectors.dim() != dim) {
      throw ContractError("vector '" + r.id + "' has dimension " +
                          std::to_string(r.vectors.dim()) + ", expected " +
                          std::to_string(dim));
    }
    if (r.vectors.rows() == 0) {
      throw ContractError("vector '" + r.id + "' has no rows");
    }
  }

  ByteWriter out;
  out.Raw(kVectorMagic);
  out.U32(kVectorFileVersion);
  out.U32(dim);
  out.U32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    out.String16(r.id);
    out.U32(static_cast<std::uint32_t>(r.vectors.rows()));
    for (float v : r.vectors.values()) out.F32(v);
  }
  return out.Take();
}

VectorFile DecodeVectorFile(std::string_view bytes) {
  ByteReader in(bytes);
  ExpectMagic(in, kVectorMagic);
  const std::uint32_t version = in.U32("version");
  if (version != kVectorFileVersion) {
    throw FormatError(FormatErrorKind::kUnsupportedVersion,
                      "vector file version " + std::to_string(version));
  }
  VectorFile file;
  file.dim = in.U32("dimension");
  if (file.dim == 0) {
    throw FormatError(FormatErrorKind::kMalformed, "zero dimension");
  }
  const std::uint32_t count = in.U32("entry count");
  std::unordered_set<std::string> ids;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id = in.String16("entry id");
    MultiVector vectors = ReadMultiVector(in, file.dim, id);
    if (!ids.insert(id).second) {
      throw FormatError(FormatErrorKind::kDuplicateId, "'" + id + "'");
    }
    file.records.push_back({std::move(id), std::move(vectors)});
  }
  if (in.remaining() != 0) {
    throw FormatError(FormatErrorKind::kMalformed,
                      std::to_string(in.remaining()) + " trailing bytes");
  }
  return file;
}

void WriteVectorFile(std::span<const VectorRecord> records, std::uint32_t dim,
                     const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeVectorFile(records, dim));
}

VectorFile ReadVectorFile(const std::filesystem::path& path) {
  return DecodeVectorFile(ReadFileBytes(path));
}

// ---- LFIX ----------------------------------------------------------------------

std::string EncodeIndex(const BlockIndex& index) {
  ByteWriter out;
  out.Raw(kIndexMagic);
  out.U32(kIndexFileVersion);
  out.U32(static_cast<std::uint32_t>(index.dim()));
  out.U64(index.size());
  for (const IndexEntry& e : index.entries()) {
    out.String16(e.block_id);
    out.String16(e.page_id);
    out.String16(e.doc_id);
    out.String16(TagName(e.tag));
    out.U32(static_cast<std::uint32_t>(e.vectors.rows()));
    for (float v : e.vectors.values()) out.F32(v);
    out.U32(e.token_cost);
  }
  return out.Take();
}

BlockIndex DecodeIndex(std::string_view bytes, IndexOptions options) {
  ByteReader in(bytes);
  ExpectMagic(in, kIndexMagic);
  const std::uint32_t version = in.U32("version");
  if (version != kIndexFileVersion) {
    throw FormatError(FormatErrorKind::kUnsupportedVersion,
                      "index file version " + std::to_string(version));
  }
  const std::uint32_t dim = in.U32("dimension");
  if (dim == 0) throw FormatError(FormatErrorKind::kMalformed, "zero dimension");
  const std::uint64_t count = in.U64("entry count");

  BlockIndex index(dim, options);
  for (std::uint64_t i = 0; i < count; ++i) {
    IndexEntry e;
    e.block_id = in.String16("block id");
    e.page_id = in.String16("page id");
    e.doc_id = in.String16("doc id");
    const std::string tag = in.String16("tag");
    try {
      e.tag = ParseBlockTag(tag);
    } catch (const ValidationError&) {
      throw FormatError(FormatErrorKind::kMalformed,
                        "unknown tag '" + tag + "' on '" + e.block_id + "'");
    }
    e.vectors = ReadMultiVector(in, dim, e.block_id);
    e.token_cost = in.U32("token cost");
    if (e.block_id.empty() || e.page_id.empty()) {
      throw FormatError(FormatErrorKind::kMalformed, "empty block or page id");
    }
    if (index.Find(e.block_id)) {
      throw FormatError(FormatErrorKind::kDuplicateId, "'" + e.block_id + "'");
    }
    if (!e.vectors.Finite()) {
      throw FormatError(FormatErrorKind::kMalformed,
                        "non-finite values in '" + e.block_id + "'");
    }
    index.Add(std::move(e));
  }
  if (in.remaining() != 0) {
    throw FormatError(FormatErrorKind::kMalformed,
                      std::to_string(in.remaining()) + " trailing bytes");
  }
  index.Seal();
  return index;
}

void WriteIndexFile(const BlockIndex& index,
                    const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeIndex(index));
}

BlockIndex ReadIndexFile(const std::filesystem::path& path,
                         IndexOptions options) {
  return DecodeIndex(ReadFileBytes(path), options);
}

// ---- layout / blocks JSON --------------------------------------------------

std::string GlobalBlockId(std::string_view page_id, int block_id) {
  return std::string(page_id) + "#" + std::to_string(block_id);
}

PageLayout ParseLayoutPage(const Json& j) {
  PageLayout page;
  ParsePageHeader(j, &page.page_id, &page.doc_id, &page.width, &page.height);
  const std::string where = "page '" + page.page_id + "'";
  const BBox bounds = page.bounds();
  for (const Json& r : ArrayField(j, "regions", where)) {
    Region region;
    const Json& id = Field(r, "id", where + " region");
    if (!id.is_number_integer()) {
      throw ValidationError(where + ": region id must be an integer");
    }
    region.id = id.get<int>();
    const std::string rwhere = where + " region " + std::to_string(region.id);
    region.bbox = ParseBox(Field(r, "bbox", rwhere), rwhere);
    region.tag = ParseDetectorTag(StringField(r, "tag", rwhere));
    region.text = OptionalString(r, "text", rwhere);
    if (bounds.united(region.bbox) != bounds) {
      throw ValidationError(rwhere + ": bbox lies outside the page");
    }
    if (!page.regions.empty() && page.regions.back().id >= region.id) {
      throw ValidationError(rwhere + ": ids must increase in reading order");
    }
    page.regions.push_back(std::move(region));
  }
  return page;
}

Json LayoutPageToJson(const PageLayout& page) {
  Json j = Json::object();
  WritePageHeader(j, page.page_id, page.doc_id, page.width, page.height);
  Json regions = Json::array();
  for (const Region& r : page.regions) {
    Json jr = Json::object();
    jr["id"] = r.id;
    jr["bbox"] = BoxToJson(r.bbox);
    jr["tag"] = TagName(r.tag);
    jr["text"] = OptionalText(r.text);
    regions.push_back(std::move(jr));
  }
  j["regions"] = std::move(regions);
  return j;
}

PageBlocks ParseBlocksPage(const Json& j) {
  PageBlocks page;
  ParsePageHeader(j, &page.page_id, &page.doc_id, &page.width, &page.height);
  const std::string where = "page '" + page.page_id + "'";
  std::set<int> ids;
  bool seen_aux = false;
  for (const Json& b : ArrayField(j, "blocks", where)) {
    Block block;
    const Json& id = Field(b, "id", where + " block");
    if (!id.is_number_integer()) {
      throw ValidationError(where + ": block id must be an integer");
    }
    block.id = id.get<int>();
    const std::string bwhere = where + " block " + std::to_string(block.id);
    if (!ids.insert(block.id).second) {
      throw ValidationError(bwhere + ": duplicate block id");
    }
    if (auto g = OptionalString(b, "block_id", bwhere);
        g && *g != GlobalBlockId(page.page_id, block.id)) {
      throw ValidationError(bwhere + ": block_id '" + *g +
                            "' does not match page and ordinal");
    }
    block.bbox = ParseBox(Field(b, "bbox", bwhere), bwhere);
    block.tag = ParseBlockTag(StringField(b, "tag", bwhere));
    for (const Json& m : ArrayField(b, "members", bwhere)) {
      if (!m.is_number_integer()) {
        throw ValidationError(bwhere + ": members must be integers");
      }
      block.member_region_ids.push_back(m.get<int>());
    }
    block.text = OptionalString(b, "text", bwhere);
    if (auto it = b.find("mask_of"); it != b.end()) {
      if (!it->is_array()) {
        throw ValidationError(bwhere + ": mask_of must be an array");
      }
      block.mask_of.emplace();
      for (const Json& box : *it) block.mask_of->push_back(ParseBox(box, bwhere));
    }
    if (block.auxiliary() != (block.tag == LayoutTag::kMaskedPage)) {
      throw ValidationError(bwhere +
                            ": mask_of and the masked_page tag go together");
    }
    if (block.auxiliary()) {
      if (seen_aux) {
        throw ValidationError(where + ": more than one auxiliary block");
      }
      seen_aux = true;
    }
    page.blocks.push_back(std::move(block));
  }
  return page;
}

Json BlocksPageToJson(const PageBlocks& page) {
  Json j = Json::object();
  WritePageHeader(j, page.page_id, page.doc_id, page.width, page.height);
  Json blocks = Json::array();
  for (const Block& b : page.blocks) {
    Json jb = Json::object();
    jb["id"] = b.id;
    jb["block_id"] = GlobalBlockId(page.page_id, b.id);
    jb["bbox"] = BoxToJson(b.bbox);
    jb["tag"] = TagName(b.tag);
    jb["members"] = b.member_region_ids;
    jb["text"] = OptionalText(b.text);
    if (b.mask_of) {
      Json masks = Json::array();
      for (const BBox& m : *b.mask_of) masks.push_back(BoxToJson(m));
      jb["mask_of"] = std::move(masks);
    }
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

PageBlocks AggregatePage(const PageLayout& page,
                         const AggregationConfig& cfg) {
  PageBlocks out;
  out.page_id = page.page_id;
  out.doc_id = page.doc_id;
  out.width = page.width;
  out.height = page.height;
  out.blocks = AggregateBlocks(page.regions, page.bounds(), cfg);
  return out;
}

std::vector<PageLayout> ParseLayoutDocument(const Json& j) {
  std::vector<PageLayout> pages;
  if (j.is_array()) {
    for (const Json& p : j) pages.push_back(ParseLayoutPage(p));
  } else {
    pages.push_back(ParseLayoutPage(j));
  }
  std::unordered_set<std::string> ids;
  for (const auto& p : pages) {
    if (!ids.insert(p.page_id).second) {
      throw ValidationError("duplicate page_id '" + p.page_id + "'");
    }
  }
  return pages;
}

std::vector<PageBlocks> ParseBlocksDocument(const Json& j) {
  std::vector<PageBlocks> pages;
  if (j.is_array()) {
    for (const Json& p : j) pages.push_back(ParseBlocksPage(p));
  } else {
    pages.push_back(ParseBlocksPage(j));
  }
  std::unordered_set<std::string> ids;
  for (const auto& p : pages) {
    if (!ids.insert(p.page_id).second) {
      throw ValidationError("duplicate page_id '" + p.page_id + "'");
    }
  }
  return pages;
}

Json ParseJsonText(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatErrorKind::kMalformed,
                      std::string(what) + ": " + e.what());
  }
}

std::string DumpJson(const Json& j) { return j.dump(2) + "\n"; }

// ---- search results ----------------------------------------------------------

Json RunsToJson(std::span<const QueryRun> runs) {
  Json queries = Json::array();
  for (const QueryRun& run : runs) {
    Json q = Json::object();
    q["query_id"] = run.query_id;
    if (run.blocks) {
      Json hits = Json::array();
      std::uint64_t total = 0;
      for (const SearchHit& h : *run.blocks) {
        Json jh = Json::object();
        jh["block_id"] = h.block_id;
        jh["page_id"] = h.page_id;
        jh["score"] = h.score;
        jh["token_cost"] = h.token_cost;
        hits.push_back(std::move(jh));
        total += h.token_cost;
      }
      q["blocks"] = std::move(hits);
      q["total_token_cost"] = total;
    }
    if (run.pages) {
      Json hits = Json::array();
      for (const PageHit& h : *run.pages) {
        Json jh = Json::object();
        jh["page_id"] = h.page_id;
        jh["score"] = h.score;
        hits.push_back(std::move(jh));
      }
      q["pages"] = std::move(hits);
    }
    if (run.generated_answer) q["answer"] = *run.generated_answer;
    if (run.judge_score) q["judge_score"] = *run.judge_score;
    queries.push_back(std::move(q));
  }
  Json j = Json::object();
  j["queries"] = std::move(queries);
  return j;
}

std::vector<QueryRun> ParseRuns(const Json& j) {
  std::vector<QueryRun> runs;
  for (const Json& q : ArrayField(j, "queries", "results")) {
    QueryRun run;
    run.query_id = StringField(q, "query_id", "results");
    const std::string where = "results for '" + run.query_id + "'";
    if (q.contains("blocks")) {
      run.blocks.emplace();
      for (const Json& h : ArrayField(q, "blocks", where)) {
        SearchHit hit;
        hit.block_id = StringField(h, "block_id", where);
        hit.page_id = StringField(h, "page_id", where);
        hit.score = NumberField(h, "score", where);
        if (auto it = h.find("token_cost"); it != h.end()) {
          hit.token_cost = CountValue(*it, where);
        }
        run.blocks->push_back(std::move(hit));
      }
    }
    if (q.contains("pages")) {
      run.pages.emplace();
      for (const Json& h : ArrayField(q, "pages", where)) {
        run.pages->push_back(
            {StringField(h, "page_id", where), NumberField(h, "score", where)});
      }
    }
    run.generated_answer = OptionalString(q, "answer", where);
    if (auto it = q.find("judge_score"); it != q.end() && !it->is_null()) {
      run.judge_score = NumberField(q, "judge_score", where);
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

// ---- manifest ----------------------------------------------------------------

BenchmarkManifest ParseManifest(const Json& j,
                                const std::filesystem::path& base_dir,
                                const AggregationConfig& cfg) {
  BenchmarkManifest m;
  m.dataset = StringField(j, "dataset", "manifest");

  std::unordered_map<std::string, std::size_t> page_index;
  for (const Json& p : ArrayField(j, "pages", "manifest")) {
    PageLayout layout;
    if (p.is_object() && p.contains("path") && !p.contains("regions")) {
      const auto path = base_dir / StringField(p, "path", "manifest page");
      layout = ParseLayoutPage(
          ParseJsonText(ReadFileBytes(path), path.string()));
    } else {
      layout = ParseLayoutPage(p);
    }
    if (!page_index.emplace(layout.page_id, m.layouts.size()).second) {
      throw ValidationError("manifest: duplicate page '" + layout.page_id +
                            "'");
    }
    try {
      m.pages.push_back(AggregatePage(layout, cfg));
    } catch (const ContractError& e) {
      throw ValidationError("page '" + layout.page_id + "': " + e.what());
    }
    m.layouts.push_back(std::move(layout));
  }

  if (auto it = j.find("page_token_costs"); it != j.end()) {
    if (!it->is_object()) {
      throw ValidationError("manifest: page_token_costs must be an object");
    }
    for (const auto& [page_id, cost] : it->items()) {
      if (!page_index.contains(page_id)) {
        throw ValidationError("manifest: page_token_costs names unknown page '" +
                              page_id + "'");
      }
      m.page_token_costs[page_id] =
          CountValue(cost, "page_token_costs '" + page_id + "'");
    }
  }

  std::unordered_map<std::string, std::string> block_page;
  for (const PageBlocks& page : m.pages) {
    for (const Block& b : page.blocks) {
      block_page.emplace(GlobalBlockId(page.page_id, b.id), page.page_id);
    }
  }

  std::unordered_set<std::string> query_ids;
  for (const Json& s : ArrayField(j, "samples", "manifest")) {
    EvalSample sample;
    sample.query_id = StringField(s, "query_id", "manifest sample");
    const std::string where = "sample '" + sample.query_id + "'";
    if (sample.query_id.empty()) throw ValidationError("sample: empty query_id");
    if (!query_ids.insert(sample.query_id).second) {
      throw ValidationError(where + ": duplicate query_id");
    }
    sample.query_text = StringField(s, "query", where);
    sample.gold_page_id = StringField(s, "gold_page_id", where);
    sample.answer_text = StringField(s, "answer", where);
    if (!page_index.contains(sample.gold_page_id)) {
      throw ValidationError(where + ": dangling page '" +
                            sample.gold_page_id + "'");
    }
    std::unordered_set<std::string> seen;
    for (const Json& g : ArrayField(s, "gold_block_ids", where)) {
      if (!g.is_string()) {
        throw ValidationError(where + ": gold_block_ids must be strings");
      }
      std::string id = g.get<std::string>();
      auto it = block_page.find(id);
      if (it == block_page.end()) {
        throw ValidationError(where + ": dangling gold_block_id '" + id + "'");
      }
      if (it->second != sample.gold_page_id) {
        throw ValidationError(where + ": gold block '" + id +
                              "' is not on page '" + sample.gold_page_id +
                              "'");
      }
      if (!seen.insert(id).second) {
        throw ValidationError(where + ": gold block '" + id + "' repeated");
      }
      sample.gold_block_ids.push_back(std::move(id));
    }
    if (sample.gold_block_ids.empty()) {
      throw ValidationError(where + ": gold_block_ids is empty");
    }
    if (auto it = s.find("page_token_cost"); it != s.end() && !it->is_null()) {
      sample.page_token_cost = CountValue(*it, where + " page_token_cost");
    }
    m.samples.push_back(std::move(sample));
  }
  return m;
}

BenchmarkManifest LoadManifest(const std::filesystem::path& path,
                               const AggregationConfig& cfg) {
  const Json j = ParseJsonText(ReadFileBytes(path), path.string());
  return ParseManifest(j, path.parent_path(), cfg);
}

Json ManifestToJson(const BenchmarkManifest& manifest) {
  Json j = Json::object();
  j["dataset"] = manifest.dataset;
  Json pages = Json::array();
  for (const auto& p : manifest.layouts) pages.push_back(LayoutPageToJson(p));
  j["pages"] = std::move(pages);
  if (!manifest.page_token_costs.empty()) {
    Json costs = Json::object();
    for (const auto& [page, cost] : manifest.page_token_costs) {
      costs[page] = cost;
    }
    j["page_token_costs"] = std::move(costs);
  }
  Json samples = Json::array();
  for (const EvalSample& s : manifest.samples) {
    Json js = Json::object();
    js["query_id"] = s.query_id;
    js["query"] = s.query_text;
    js["gold_block_ids"] = s.gold_block_ids;
    js["gold_page_id"] = s.gold_page_id;
    js["answer"] = s.answer_text;
    if (s.page_token_cost) js["page_token_cost"] = *s.page_token_cost;
    samples.push_back(std::move(js));
  }
  j["samples"] = std::move(samples);
  return j;
}

EvalCorpus BuildEvalCorpus(const BenchmarkManifest& manifest) {
  EvalCorpus corpus;
  for (const PageBlocks& page : manifest.pages) {
    for (const Block& b : page.blocks) {
      if (b.text) corpus.block_text[GlobalBlockId(page.page_id, b.id)] = *b.text;
    }
  }
  for (const EvalSample& s : manifest.samples) {
    if (s.page_token_cost) {
      corpus.page_token_cost[s.gold_page_id] = *s.page_token_cost;
    }
  }
  for (const auto& [page, cost] : manifest.page_token_costs) {
    corpus.page_token_cost[page] = cost;
  }
  return corpus;
}

ManifestStats ComputeManifestStats(const BenchmarkManifest& manifest) {
  ManifestStats stats;
  stats.qa_pairs = manifest.samples.size();
  stats.pages = manifest.pages.size();
  const auto words = [](const std::string& s) {
    std::istringstream in(s);
    return static_cast<double>(std::distance(std::istream_iterator<std::string>(in),
                                             std::istream_iterator<std::string>()));
  };
  double q = 0, a = 0, rel = 0;
  for (const auto& s : manifest.samples) {
    q += words(s.query_text);
    a += words(s.answer_text);
    rel += static_cast<double>(s.gold_block_ids.size());
  }
  double blocks = 0;
  for (const auto& p : manifest.pages) {
    for (const auto& b : p.blocks) blocks += b.auxiliary() ? 0 : 1;
  }
  if (stats.qa_pairs > 0) {
    const double n = static_cast<double>(stats.qa_pairs);
    stats.avg_question_length = q / n;
    stats.avg_answer_length = a / n;
    stats.avg_relevant_blocks = rel / n;
  }
  if (stats.pages > 0) {
    stats.avg_blocks_per_page = blocks / static_cast<double>(stats.pages);
  }
  return stats;
}

// ---- report ------------------------------------------------------------------

namespace {

Json ReportTree(const MetricReport& r, bool rounded) {
  const auto num = [&](double x) { return rounded ? Round4(x) : x; };
  const auto level = [&](const LevelMetrics& m) {
    Json j = Json::object();
    Json nd = Json::object();
    Json rc = Json::object();
    for (const auto& [k, v] : m.ndcg) nd[std::to_string(k)] = num(v);
    for (const auto& [k, v] : m.recall) rc[std::to_string(k)] = num(v);
    j["ndcg"] = std::move(nd);
    j["recall"] = std::move(rc);
    j["count"] = m.count;
    return j;
  };
  const auto opt = [&](const std::optional<double>& v) {
    return v ? Json(num(*v)) : Json(nullptr);
  };

  Json j = Json::object();
  j["samples"] = r.sample_count;
  j["block_level"] = r.block_level ? level(*r.block_level) : Json(nullptr);
  j["page_level"] = r.page_level ? level(*r.page_level) : Json(nullptr);
  Json gen = Json::object();
  gen["rouge_l"] = opt(r.rouge_l);
  gen["word_f1"] = opt(r.word_f1);
  gen["judge_score"] = opt(r.judge_score);
  gen["count"] = r.generation_count;
  j["generation"] = std::move(gen);
  Json anlcs = Json::object();
  anlcs["mean"] = opt(r.anlcs);
  anlcs["count"] = r.anlcs_count;
  j["anlcs"] = std::move(anlcs);
  Json tokens = Json::object();
  tokens["mean_block_tokens"] = opt(r.mean_tokens);
  tokens["mean_page_tokens"] = opt(r.mean_page_tokens);
  tokens["reduction"] = opt(r.token_reduction);
  j["tokens"] = std::move(tokens);
  return j;
}

}  // namespace

Json ReportToJson(const MetricReport& report, const EvalOptions& options,
                  const Json& config) {
  Json j = ReportTree(report, /*rounded=*/true);
  j["raw"] = ReportTree(report, /*rounded=*/false);
  Json eval = Json::object();
  eval["ks"] = options.ks;
  eval["generation_k"] = options.generation_k;
  eval["rouge_beta"] = options.rouge_beta;
  Json cfg = config.is_null() ? Json::object() : config;
  cfg["eval"] = std::move(eval);
  j["config"] = std::move(cfg);
  return j;
}

}  // namespace layoutret
