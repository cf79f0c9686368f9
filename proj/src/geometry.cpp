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

#include "layoutret/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "layoutret/error.hpp"

namespace layoutret {
namespace {

struct TagNameEntry {
  LayoutTag tag;
  std::string_view name;
};

constexpr std::array<TagNameEntry, 11> kTagNames = {{
    {LayoutTag::kAbandon, "abandon"},
    {LayoutTag::kTitle, "title"},
    {LayoutTag::kFigure, "figure"},
    {LayoutTag::kFigureCaption, "figure_caption"},
    {LayoutTag::kTable, "table"},
    {LayoutTag::kTableCaption, "table_caption"},
    {LayoutTag::kTableFootnote, "table_footnote"},
    {LayoutTag::kPlainText, "plain_text"},
    {LayoutTag::kIsolateFormula, "isolate_formula"},
    {LayoutTag::kFormulaCaption, "formula_caption"},
    {LayoutTag::kMaskedPage, "masked_page"},
}};

double IntervalOverlap(double a1, double a2, double b1, double b2) {
  return std::max(0.0, std::min(a2, b2) - std::max(a1, b1));
}

}  // namespace

bool BBox::valid() const {
  for (double v : {x1, y1, x2, y2}) {
    if (!std::isfinite(v) || v < 0) return false;
  }
  return x1 < x2 && y1 < y2;
}

BBox BBox::united(const BBox& other) const {
  return {std::min(x1, other.x1), std::min(y1, other.y1),
          std::max(x2, other.x2), std::max(y2, other.y2)};
}

SemanticGroup GroupOf(LayoutTag tag) {
  switch (tag) {
    case LayoutTag::kTitle:
      return SemanticGroup::kTitle;
    case LayoutTag::kFigure:
    case LayoutTag::kFigureCaption:
      return SemanticGroup::kFigure;
    case LayoutTag::kTable:
    case LayoutTag::kTableCaption:
    case LayoutTag::kTableFootnote:
      return SemanticGroup::kTable;
    case LayoutTag::kPlainText:
    case LayoutTag::kIsolateFormula:
    case LayoutTag::kFormulaCaption:
      return SemanticGroup::kText;
    case LayoutTag::kAbandon:
    case LayoutTag::kMaskedPage:
      return SemanticGroup::kAbandon;
  }
  return SemanticGroup::kAbandon;
}

std::string_view TagName(LayoutTag tag) {
  for (const auto& e : kTagNames) {
    if (e.tag == tag) return e.name;
  }
  return "unknown";
}

LayoutTag ParseBlockTag(std::string_view name) {
  for (const auto& e : kTagNames) {
    if (e.name == name) return e.tag;
  }
  throw ValidationError("unknown layout tag '" + std::string(name) + "'");
}

LayoutTag ParseDetectorTag(std::string_view name) {
  LayoutTag tag = ParseBlockTag(name);
  if (tag == LayoutTag::kMaskedPage) {
    throw ValidationError("layout tag '" + std::string(name) +
                          "' is reserved for the auxiliary block");
  }
  return tag;
}

std::vector<LayoutTag> AggregationConfig::DefaultPriority() {
  return {LayoutTag::kTitle,          LayoutTag::kTable,
          LayoutTag::kFigure,         LayoutTag::kTableCaption,
          LayoutTag::kFigureCaption,  LayoutTag::kTableFootnote,
          LayoutTag::kIsolateFormula, LayoutTag::kFormulaCaption,
          LayoutTag::kPlainText,      LayoutTag::kAbandon};
}

void AggregationConfig::Validate() const {
  auto ratio_ok = [](double v) { return std::isfinite(v) && v >= 0 && v <= 1; };
  if (!ratio_ok(tau_x)) throw ContractError("tau_x must lie in [0,1]");
  if (!ratio_ok(tau_o)) throw ContractError("tau_o must lie in [0,1]");
  if (!std::isfinite(tau_y) || tau_y < 0)
    throw ContractError("tau_y must be a non-negative pixel count");
  if (!std::isfinite(delta) || delta < 0)
    throw ContractError("delta must be a non-negative pixel count");
  if (priority.size() != kDetectorTags.size())
    throw ContractError("priority must list every layout tag exactly once");
  for (LayoutTag tag : kDetectorTags) {
    if (std::count(priority.begin(), priority.end(), tag) != 1) {
      throw ContractError("priority must list tag '" +
                          std::string(TagName(tag)) + "' exactly once");
    }
  }
}

double IouX(const BBox& a, const BBox& b) {
  const double inter = IntervalOverlap(a.x1, a.x2, b.x1, b.x2);
  const double union_len = a.width() + b.width() - inter;
  return union_len > 0 ? inter / union_len : 0.0;
}

double DeltaY(const BBox& a, const BBox& b) {
  return std::max(a.y1, b.y1) - std::min(a.y2, b.y2);
}

double OverlapRatio(const BBox& a, const BBox& b) {
  const double inter = IntervalOverlap(a.x1, a.x2, b.x1, b.x2) *
                       IntervalOverlap(a.y1, a.y2, b.y1, b.y2);
  const double smaller = std::min(a.area(), b.area());
  return smaller > 0 ? inter / smaller : 0.0;
}

bool SemanticallyConsistent(LayoutTag a, LayoutTag b,
                            const AggregationConfig& cfg) {
  if (cfg.exact_tag_match) return a == b;
  const SemanticGroup ga = GroupOf(a);
  const SemanticGroup gb = GroupOf(b);
  if (ga == gb) return true;
  const auto title_text = [](SemanticGroup x, SemanticGroup y) {
    return x == SemanticGroup::kTitle && y == SemanticGroup::kText;
  };
  return title_text(ga, gb) || title_text(gb, ga);
}

bool MergePredicate(const Region& a, const Region& b,
                    const AggregationConfig& cfg) {
  const bool semantic = SemanticallyConsistent(a.tag, b.tag, cfg);
  const double dy = DeltaY(a.bbox, b.bbox);
  const bool spatial =
      IouX(a.bbox, b.bbox) > cfg.tau_x && -cfg.delta < dy && dy < cfg.tau_y;
  return (semantic && spatial) || OverlapRatio(a.bbox, b.bbox) > cfg.tau_o;
}

LayoutTag TagPriority(std::span<const LayoutTag> tags,
                      const AggregationConfig& cfg) {
  if (tags.empty()) throw ContractError("tag priority of an empty tag set");
  for (LayoutTag candidate : cfg.priority) {
    if (std::find(tags.begin(), tags.end(), candidate) != tags.end())
      return candidate;
  }
  throw ContractError("tag '" + std::string(TagName(tags.front())) +
                      "' is missing from the priority table");
}

std::vector<Block> AggregateBlocks(std::span<const Region> regions,
                                   const BBox& page_bbox,
                                   const AggregationConfig& cfg) {
  if (!page_bbox.valid()) throw ContractError("invalid page bounds");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Region& r = regions[i];
    if (!r.bbox.valid()) {
      throw ContractError("region " + std::to_string(r.id) +
                          " has an invalid bbox");
    }
    if (r.tag == LayoutTag::kMaskedPage) {
      throw ContractError("region " + std::to_string(r.id) +
                          " carries the reserved masked_page tag");
    }
    if (page_bbox.united(r.bbox) != page_bbox) {
      throw ContractError("region " + std::to_string(r.id) +
                          " lies outside the page bounds");
    }
    if (i > 0 && regions[i - 1].id >= r.id) {
      throw ContractError("region ids must be unique and in reading order");
    }
  }

  const std::size_t m = regions.size();
  std::vector<std::vector<std::size_t>> adjacency(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (MergePredicate(regions[i], regions[j], cfg)) {
        adjacency[i].push_back(j);
        adjacency[j].push_back(i);
      }
    }
  }

  // Components discovered in index order, so each starts at its smallest
  // member and the output is ordered by minimal member id.
  std::vector<Block> blocks;
  std::vector<bool> seen(m, false);
  for (std::size_t start = 0; start < m; ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> members;
    std::queue<std::size_t> frontier;
    frontier.push(start);
    seen[start] = true;
    while (!frontier.empty()) {
      const std::size_t cur = frontier.front();
      frontier.pop();
      members.push_back(cur);
      for (std::size_t next : adjacency[cur]) {
        if (!seen[next]) {
          seen[next] = true;
          frontier.push(next);
        }
      }
    }
    std::sort(members.begin(), members.end());

    Block block;
    block.id = static_cast<int>(blocks.size()) + 1;
    block.bbox = regions[members.front()].bbox;
    std::vector<LayoutTag> tags;
    std::string text;
    bool has_text = false;
    for (std::size_t idx : members) {
      const Region& r = regions[idx];
      block.bbox = block.bbox.united(r.bbox);
      block.member_region_ids.push_back(r.id);
      tags.push_back(r.tag);
      if (r.text) {
        if (has_text) text += '\n';
        text += *r.text;
        has_text = true;
      }
    }
    block.tag = TagPriority(tags, cfg);
    if (has_text) block.text = std::move(text);
    blocks.push_back(std::move(block));
  }

  Block aux;
  aux.id = static_cast<int>(blocks.size()) + 1;
  aux.bbox = page_bbox;
  aux.tag = LayoutTag::kMaskedPage;
  aux.mask_of.emplace();
  for (const Block& b : blocks) aux.mask_of->push_back(b.bbox);
  blocks.push_back(std::move(aux));
  return blocks;
}

}  // namespace layoutret
