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

#include "layoutret/synthetic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "layoutret/corpus_io.hpp"
#include "layoutret/error.hpp"
#include "layoutret/verify.hpp"

namespace layoutret::synthetic {
namespace {

using verify::Gaussian;
using verify::Rng;
using verify::Uniform;
using verify::UniformIndex;

std::string Word(Rng& rng) {
  static constexpr const char* kOnsets[] = {"b", "c", "d", "f", "g", "k", "l",
                                            "m", "n", "p", "r", "s", "t", "v"};
  static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};
  std::string w;
  const std::size_t syllables = 2 + UniformIndex(rng, 2);
  for (std::size_t i = 0; i < syllables; ++i) {
    w += kOnsets[UniformIndex(rng, std::size(kOnsets))];
    w += kVowels[UniformIndex(rng, std::size(kVowels))];
  }
  return w;
}

std::string Sentence(Rng& rng, std::size_t words) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += Word(rng);
  }
  return s;
}

MultiVector PlantedBlock(Rng& rng, std::size_t rows, std::size_t dim) {
  std::vector<float> v(rows * dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (float& x : v) x = static_cast<float>(Gaussian(rng) * scale);
  return MultiVector(rows, dim, std::move(v));
}

}  // namespace

void WriteBenchmark(const std::filesystem::path& out_dir,
                    const Options& options) {
  std::filesystem::create_directories(out_dir);
  Rng rng(options.seed);
  const AggregationConfig cfg;

  Json layout_doc = Json::array();
  std::vector<PageLayout> layouts;
  std::vector<PageBlocks> aggregated;
  Json page_costs = Json::object();
  Json block_costs = Json::object();
  std::vector<VectorRecord> block_vectors;

  for (std::size_t p = 0; p < options.pages; ++p) {
    PageLayout page;
    char pid[16];
    std::snprintf(pid, sizeof(pid), "p%03zu", p + 1);
    page.page_id = pid;
    page.doc_id = "doc" + std::to_string(p / 2 + 1);
    page.width = 1000;
    page.height = 1400;

    const double x1 = std::round(Uniform(rng, 60, 120));
    const double x2 = std::round(Uniform(rng, 880, 940));
    double y = std::round(Uniform(rng, 60, 100));
    int id = 0;
    const auto add = [&](LayoutTag tag, double height, double gap,
                         std::size_t words) {
      y += gap;
      Region r;
      r.id = id++;
      r.bbox = {x1, y, x2, y + height};
      r.tag = tag;
      r.text = Sentence(rng, words);
      y += height;
      page.regions.push_back(std::move(r));
    };
    add(LayoutTag::kTitle, 40, 0, 4);
    add(LayoutTag::kPlainText, std::round(Uniform(rng, 100, 160)),
        std::round(Uniform(rng, 10, 25)), 14);
    add(LayoutTag::kPlainText, std::round(Uniform(rng, 80, 140)),
        std::round(Uniform(rng, 5, 25)), 12);
    add(LayoutTag::kFigure, std::round(Uniform(rng, 200, 260)), 70, 6);
    add(LayoutTag::kFigureCaption, 30, std::round(Uniform(rng, 4, 12)), 9);
    add(LayoutTag::kTable, std::round(Uniform(rng, 200, 260)), 70, 10);
    add(LayoutTag::kTableCaption, 30, std::round(Uniform(rng, 4, 12)), 8);

    PageBlocks blocks = AggregatePage(page, cfg);
    if (blocks.blocks.size() != 4) {
      throw ContractError("synthetic page " + page.page_id +
                          " did not aggregate into three blocks");
    }
    const std::uint32_t third =
        static_cast<std::uint32_t>(300 + 10 * UniformIndex(rng, 21));
    page_costs[page.page_id] = 3 * third;
    for (const Block& b : blocks.blocks) {
      const std::string gid = GlobalBlockId(page.page_id, b.id);
      block_costs[gid] = third;
      block_vectors.push_back(
          {gid, PlantedBlock(rng, options.block_tokens, options.dim)});
    }
    layout_doc.push_back(LayoutPageToJson(page));
    layouts.push_back(std::move(page));
    aggregated.push_back(std::move(blocks));
  }

  Json samples = Json::array();
  std::vector<VectorRecord> query_vectors;
  const std::size_t n_blocks_per_page = 4;
  std::size_t q = 0;
  for (std::size_t p = 0; p < options.pages; ++p) {
    const PageBlocks& page = aggregated[p];
    for (std::size_t s = 0; s < options.samples_per_page; ++s) {
      // Gold: one content block, or two for every third query.
      std::vector<std::size_t> gold;
      gold.push_back(UniformIndex(rng, 3));
      if (q % 3 == 2) gold.push_back((gold.front() + 1) % 3);

      Json gold_ids = Json::array();
      std::vector<std::string> gold_texts;
      for (std::size_t g : gold) {
        const Block& b = page.blocks[g];
        gold_ids.push_back(GlobalBlockId(page.page_id, b.id));
        gold_texts.push_back(*b.text);
      }
      // Answer: a contiguous span of the first gold block's text.
      std::vector<std::string> words;
      {
        std::string cur;
        for (char c : gold_texts.front()) {
          if (c == ' ' || c == '\n') {
            if (!cur.empty()) words.push_back(cur);
            cur.clear();
          } else {
            cur += c;
          }
        }
        if (!cur.empty()) words.push_back(cur);
      }
      const std::size_t len = std::min<std::size_t>(words.size(), 5);
      const std::size_t start = UniformIndex(rng, words.size() - len + 1);
      std::string answer;
      for (std::size_t i = 0; i < len; ++i) {
        if (i) answer += ' ';
        answer += words[start + i];
      }

      char qid[16];
      std::snprintf(qid, sizeof(qid), "q%03zu", q + 1);
      Json js = Json::object();
      js["query_id"] = qid;
      js["query"] = "what does the page say about " + words[start] + "?";
      js["gold_block_ids"] = std::move(gold_ids);
      js["gold_page_id"] = page.page_id;
      js["answer"] = answer;
      samples.push_back(std::move(js));

      std::vector<float> qv(options.query_tokens * options.dim);
      for (std::size_t t = 0; t < options.query_tokens; ++t) {
        const std::size_t g = gold[t % gold.size()];
        const MultiVector& src =
            block_vectors[p * n_blocks_per_page + g].vectors;
        const auto row = src.row(UniformIndex(rng, src.rows()));
        const double scale = 1.0 / std::sqrt(static_cast<double>(options.dim));
        for (std::size_t c = 0; c < options.dim; ++c) {
          qv[t * options.dim + c] = static_cast<float>(
              row[c] + options.query_noise * Gaussian(rng) * scale);
        }
      }
      query_vectors.push_back(
          {qid, MultiVector(options.query_tokens, options.dim, std::move(qv))});
      ++q;
    }
  }

  Json manifest = Json::object();
  manifest["dataset"] = "synthetic-" + std::to_string(q);
  manifest["pages"] = layout_doc;
  manifest["page_token_costs"] = page_costs;
  manifest["samples"] = std::move(samples);

  const auto dim = static_cast<std::uint32_t>(options.dim);
  WriteFileBytes(out_dir / "layout.json", DumpJson(layout_doc));
  WriteFileBytes(out_dir / "manifest.json", DumpJson(manifest));
  WriteFileBytes(out_dir / "token_costs.json", DumpJson(block_costs));
  WriteVectorFile(block_vectors, dim, out_dir / "block_vectors.lfve");
  WriteVectorFile(query_vectors, dim, out_dir / "query_vectors.lfve");
}

}  // namespace layoutret::synthetic
