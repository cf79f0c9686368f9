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

#ifndef LAYOUTRET_GEOMETRY_HPP_
#define LAYOUTRET_GEOMETRY_HPP_

// Layout regions, semantic blocks and the graph-based aggregation that turns
// fragmented detector output into retrieval units.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace layoutret {

// Axis-aligned box in page pixels, origin top-left. Coordinates may be
// fractional.
struct BBox {
  double x1 = 0;
  double y1 = 0;
  double x2 = 0;
  double y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  // x1 < x2, y1 < y2, finite and non-negative.
  bool valid() const;

  // Smallest box enclosing both.
  BBox united(const BBox& other) const;

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Detector classes. kMaskedPage never comes from a detector: it labels the
// per-page auxiliary block whose image is the page with every block masked.
enum class LayoutTag {
  kAbandon,
  kTitle,
  kFigure,
  kFigureCaption,
  kTable,
  kTableCaption,
  kTableFootnote,
  kPlainText,
  kIsolateFormula,
  kFormulaCaption,
  kMaskedPage,
};

inline constexpr std::array<LayoutTag, 10> kDetectorTags = {
    LayoutTag::kAbandon,       LayoutTag::kTitle,
    LayoutTag::kFigure,        LayoutTag::kFigureCaption,
    LayoutTag::kTable,         LayoutTag::kTableCaption,
    LayoutTag::kTableFootnote, LayoutTag::kPlainText,
    LayoutTag::kIsolateFormula, LayoutTag::kFormulaCaption,
};

enum class SemanticGroup { kAbandon, kTitle, kFigure, kTable, kText };

SemanticGroup GroupOf(LayoutTag tag);

std::string_view TagName(LayoutTag tag);

// Parses a detector class name ("plain_text", "figure_caption", ...).
// Throws ValidationError naming the string when it is not a detector tag.
LayoutTag ParseDetectorTag(std::string_view name);

// Like ParseDetectorTag but also accepts "masked_page".
LayoutTag ParseBlockTag(std::string_view name);

struct Region {
  int id = 0;  // reading-order ordinal, unique within the page
  BBox bbox;
  LayoutTag tag = LayoutTag::kPlainText;
  std::optional<std::string> text;
};

// Thresholds of the merge predicate. Defaults are the published values for
// tau_y, tau_x and tau_o; delta is ours.
struct AggregationConfig {
  double tau_x = 0.7;   // minimum horizontal IoU (exclusive)
  double tau_y = 40.0;  // maximum vertical gap in pixels (exclusive)
  double tau_o = 0.9;   // forced-merge overlap ratio (exclusive)
  double delta = 5.0;   // tolerated vertical overlap in pixels (exclusive)

  // Require identical tags instead of identical semantic groups (plus the
  // title/text exception).
  bool exact_tag_match = false;

  // Highest priority first. Must list every detector tag exactly once.
  std::vector<LayoutTag> priority = DefaultPriority();

  static std::vector<LayoutTag> DefaultPriority();

  // Throws ContractError describing the first invalid field.
  void Validate() const;
};

struct Block {
  int id = 0;  // 1-based ordinal within the page; the auxiliary block is n+1
  BBox bbox;
  LayoutTag tag = LayoutTag::kPlainText;
  std::vector<int> member_region_ids;
  // Engaged only for the auxiliary masked-page block: the boxes masked out.
  std::optional<std::vector<BBox>> mask_of;
  std::optional<std::string> text;

  bool auxiliary() const { return mask_of.has_value(); }
};

// Intersection over union of the two x-intervals.
double IouX(const BBox& a, const BBox& b);

// Vertical gap between the boxes: max(a.y1, b.y1) - min(a.y2, b.y2).
// Negative when the y-intervals overlap.
double DeltaY(const BBox& a, const BBox& b);

// Intersection area over the smaller box's area.
double OverlapRatio(const BBox& a, const BBox& b);

// True when the two tags may merge on spatial grounds alone.
bool SemanticallyConsistent(LayoutTag a, LayoutTag b,
                            const AggregationConfig& cfg);

// (S && G) || Ov > tau_o.
bool MergePredicate(const Region& a, const Region& b,
                    const AggregationConfig& cfg);

// Member tag ranked highest in cfg.priority. Throws ContractError on empty
// input.
LayoutTag TagPriority(std::span<const LayoutTag> tags,
                      const AggregationConfig& cfg);

// Connected components of the merge graph, each turned into a block, ordered
// by smallest member id, followed by the auxiliary masked-page block whose
// bbox is page_bbox.
std::vector<Block> AggregateBlocks(std::span<const Region> regions,
                                   const BBox& page_bbox,
                                   const AggregationConfig& cfg = {});

}  // namespace layoutret

#endif  // LAYOUTRET_GEOMETRY_HPP_
