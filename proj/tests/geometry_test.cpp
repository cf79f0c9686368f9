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

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "layoutret/error.hpp"
#include "layoutret/verify.hpp"

namespace layoutret {
namespace {

Region MakeRegion(int id, BBox box, LayoutTag tag) {
  return Region{id, box, tag, std::nullopt};
}

TEST(BBoxTest, Validity) {
  EXPECT_TRUE((BBox{0, 0, 1, 1}).valid());
  EXPECT_FALSE((BBox{1, 0, 1, 1}).valid());
  EXPECT_FALSE((BBox{0, 2, 1, 1}).valid());
  EXPECT_FALSE((BBox{-1, 0, 1, 1}).valid());
}

TEST(IouXTest, HandCases) {
  EXPECT_DOUBLE_EQ(IouX({0, 0, 10, 5}, {0, 10, 10, 15}), 1.0);
  EXPECT_DOUBLE_EQ(IouX({0, 0, 10, 5}, {20, 0, 30, 5}), 0.0);
  EXPECT_DOUBLE_EQ(IouX({0, 0, 10, 5}, {5, 0, 15, 5}), 5.0 / 15.0);
}

TEST(DeltaYTest, HandCases) {
  EXPECT_DOUBLE_EQ(DeltaY({0, 0, 10, 10}, {0, 10, 10, 20}), 0.0);
  EXPECT_DOUBLE_EQ(DeltaY({0, 0, 10, 10}, {0, 30, 10, 40}), 20.0);
  EXPECT_DOUBLE_EQ(DeltaY({0, 0, 10, 10}, {0, 5, 10, 15}), -5.0);
}

TEST(OverlapRatioTest, HandCases) {
  EXPECT_DOUBLE_EQ(OverlapRatio({0, 0, 10, 10}, {2, 2, 8, 8}), 1.0);
  EXPECT_DOUBLE_EQ(OverlapRatio({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
  EXPECT_DOUBLE_EQ(OverlapRatio({0, 0, 10, 10}, {5, 5, 15, 15}), 0.25);
}

TEST(GeometryTest, MeasuresAreSymmetric) {
  verify::Rng rng(11);
  const BBox page{0, 0, 1000, 1400};
  for (int n = 0; n < 200; ++n) {
    const auto regions = verify::RandomRegions(rng, 12, page);
    for (const auto& a : regions) {
      for (const auto& b : regions) {
        EXPECT_EQ(IouX(a.bbox, b.bbox), IouX(b.bbox, a.bbox));
        EXPECT_EQ(DeltaY(a.bbox, b.bbox), DeltaY(b.bbox, a.bbox));
        EXPECT_EQ(OverlapRatio(a.bbox, b.bbox), OverlapRatio(b.bbox, a.bbox));
        EXPECT_EQ(MergePredicate(a, b, {}), MergePredicate(b, a, {}));
        const double iou = IouX(a.bbox, b.bbox);
        EXPECT_GE(iou, 0.0);
        EXPECT_LE(iou, 1.0);
      }
    }
  }
}

TEST(TagTest, GroupsFollowTheSemanticTable) {
  EXPECT_EQ(GroupOf(LayoutTag::kAbandon), SemanticGroup::kAbandon);
  EXPECT_EQ(GroupOf(LayoutTag::kTitle), SemanticGroup::kTitle);
  EXPECT_EQ(GroupOf(LayoutTag::kFigure), SemanticGroup::kFigure);
  EXPECT_EQ(GroupOf(LayoutTag::kFigureCaption), SemanticGroup::kFigure);
  EXPECT_EQ(GroupOf(LayoutTag::kTable), SemanticGroup::kTable);
  EXPECT_EQ(GroupOf(LayoutTag::kTableCaption), SemanticGroup::kTable);
  EXPECT_EQ(GroupOf(LayoutTag::kTableFootnote), SemanticGroup::kTable);
  EXPECT_EQ(GroupOf(LayoutTag::kPlainText), SemanticGroup::kText);
  EXPECT_EQ(GroupOf(LayoutTag::kIsolateFormula), SemanticGroup::kText);
  EXPECT_EQ(GroupOf(LayoutTag::kFormulaCaption), SemanticGroup::kText);
}

TEST(TagTest, NamesRoundTripAndUnknownNamesAreRejected) {
  for (LayoutTag t : kDetectorTags) EXPECT_EQ(ParseDetectorTag(TagName(t)), t);
  EXPECT_THROW(ParseDetectorTag("paragraph"), ValidationError);
  EXPECT_THROW(ParseDetectorTag("masked_page"), ValidationError);
  EXPECT_EQ(ParseBlockTag("masked_page"), LayoutTag::kMaskedPage);
  try {
    ParseDetectorTag("sidebar");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("sidebar"), std::string::npos);
  }
}

TEST(AggregationConfigTest, DefaultsArePublishedThresholds) {
  const AggregationConfig cfg;
  EXPECT_EQ(cfg.tau_y, 40.0);
  EXPECT_EQ(cfg.tau_x, 0.7);
  EXPECT_EQ(cfg.tau_o, 0.9);
  EXPECT_EQ(cfg.delta, 5.0);
  EXPECT_NO_THROW(cfg.Validate());
}

TEST(AggregationConfigTest, ValidateRejectsBadFields) {
  AggregationConfig cfg;
  cfg.tau_x = 1.5;
  EXPECT_THROW(cfg.Validate(), ContractError);
  cfg = {};
  cfg.tau_y = -1;
  EXPECT_THROW(cfg.Validate(), ContractError);
  cfg = {};
  cfg.priority.pop_back();
  EXPECT_THROW(cfg.Validate(), ContractError);
  cfg = {};
  cfg.priority.back() = cfg.priority.front();
  EXPECT_THROW(cfg.Validate(), ContractError);
}

// a=[0,0,100,20], b=[0,30,90,50]: IoU_x = 90/100, gap 10, no overlap.
TEST(MergePredicateTest, SpatialAndSemantic) {
  const BBox a{0, 0, 100, 20};
  const BBox b{0, 30, 90, 50};
  ASSERT_DOUBLE_EQ(IouX(a, b), 0.9);
  ASSERT_DOUBLE_EQ(DeltaY(a, b), 10.0);
  ASSERT_DOUBLE_EQ(OverlapRatio(a, b), 0.0);
  const AggregationConfig cfg;
  EXPECT_TRUE(MergePredicate(MakeRegion(0, a, LayoutTag::kPlainText),
                             MakeRegion(1, b, LayoutTag::kPlainText), cfg));
  EXPECT_FALSE(MergePredicate(MakeRegion(0, a, LayoutTag::kFigure),
                              MakeRegion(1, b, LayoutTag::kPlainText), cfg));
  EXPECT_TRUE(MergePredicate(MakeRegion(0, a, LayoutTag::kTitle),
                             MakeRegion(1, b, LayoutTag::kPlainText), cfg));
  EXPECT_TRUE(MergePredicate(MakeRegion(0, a, LayoutTag::kIsolateFormula),
                             MakeRegion(1, b, LayoutTag::kTitle), cfg));
  EXPECT_FALSE(MergePredicate(MakeRegion(0, a, LayoutTag::kTitle),
                              MakeRegion(1, b, LayoutTag::kTable), cfg));
}

TEST(MergePredicateTest, ForcedMergeOnSevereOverlap) {
  // Intersection 100 x 95 over the smaller area 10000.
  const BBox a{0, 0, 100, 100};
  const BBox b{0, 5, 100, 105};
  ASSERT_DOUBLE_EQ(OverlapRatio(a, b), 0.95);
  EXPECT_TRUE(MergePredicate(MakeRegion(0, a, LayoutTag::kFigure),
                             MakeRegion(1, b, LayoutTag::kPlainText), {}));
}

TEST(MergePredicateTest, ThresholdsAreExclusive) {
  const AggregationConfig cfg;
  const auto text = [](BBox b) { return MakeRegion(0, b, LayoutTag::kPlainText); };
  // IoU_x exactly 0.7 does not merge.
  EXPECT_FALSE(MergePredicate(text({0, 0, 100, 10}), text({0, 20, 70, 30}), cfg));
  EXPECT_TRUE(MergePredicate(text({0, 0, 100, 10}), text({0, 20, 71, 30}), cfg));
  // Gap exactly tau_y does not merge.
  EXPECT_FALSE(MergePredicate(text({0, 0, 100, 10}), text({0, 50, 100, 60}), cfg));
  EXPECT_TRUE(MergePredicate(text({0, 0, 100, 10}), text({0, 49.5, 100, 60}), cfg));
  // Vertical overlap of exactly delta does not merge; slightly less does.
  EXPECT_FALSE(MergePredicate(text({0, 0, 100, 100}), text({0, 95, 100, 200}), cfg));
  EXPECT_TRUE(MergePredicate(text({0, 0, 100, 100}), text({0, 95.5, 100, 200}), cfg));
}

TEST(MergePredicateTest, ExactTagMode) {
  AggregationConfig cfg;
  cfg.exact_tag_match = true;
  const BBox a{0, 0, 100, 20};
  const BBox b{0, 30, 100, 50};
  EXPECT_FALSE(MergePredicate(MakeRegion(0, a, LayoutTag::kFigure),
                              MakeRegion(1, b, LayoutTag::kFigureCaption), cfg));
  EXPECT_FALSE(MergePredicate(MakeRegion(0, a, LayoutTag::kTitle),
                              MakeRegion(1, b, LayoutTag::kPlainText), cfg));
  EXPECT_TRUE(MergePredicate(MakeRegion(0, a, LayoutTag::kPlainText),
                             MakeRegion(1, b, LayoutTag::kPlainText), cfg));
}

TEST(TagPriorityTest, HandCases) {
  const AggregationConfig cfg;
  const std::vector<LayoutTag> one = {LayoutTag::kPlainText};
  const std::vector<LayoutTag> fig = {LayoutTag::kFigureCaption,
                                      LayoutTag::kFigure};
  const std::vector<LayoutTag> title = {
      LayoutTag::kPlainText, LayoutTag::kTitle, LayoutTag::kPlainText};
  EXPECT_EQ(TagPriority(one, cfg), LayoutTag::kPlainText);
  EXPECT_EQ(TagPriority(fig, cfg), LayoutTag::kFigure);
  EXPECT_EQ(TagPriority(title, cfg), LayoutTag::kTitle);
  EXPECT_THROW(TagPriority({}, cfg), ContractError);
}

TEST(TagPriorityTest, FollowsConfiguredOrder) {
  AggregationConfig cfg;
  std::reverse(cfg.priority.begin(), cfg.priority.end());
  const std::vector<LayoutTag> tags = {LayoutTag::kTitle, LayoutTag::kPlainText};
  EXPECT_EQ(TagPriority(tags, cfg), LayoutTag::kPlainText);
}

const BBox kPage{0, 0, 1000, 1400};

TEST(AggregateBlocksTest, SingleRegion) {
  const std::vector<Region> regions = {
      {0, {10, 10, 200, 50}, LayoutTag::kTable, std::string("cells")}};
  const auto blocks = AggregateBlocks(regions, kPage);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].id, 1);
  EXPECT_EQ(blocks[0].bbox, regions[0].bbox);
  EXPECT_EQ(blocks[0].tag, LayoutTag::kTable);
  EXPECT_EQ(blocks[0].member_region_ids, std::vector<int>{0});
  EXPECT_EQ(blocks[0].text, "cells");
  EXPECT_FALSE(blocks[0].auxiliary());

  const Block& aux = blocks[1];
  EXPECT_EQ(aux.id, 2);
  EXPECT_TRUE(aux.auxiliary());
  EXPECT_EQ(aux.tag, LayoutTag::kMaskedPage);
  EXPECT_EQ(aux.bbox, kPage);
  EXPECT_EQ(*aux.mask_of, std::vector<BBox>{regions[0].bbox});
  EXPECT_TRUE(aux.member_region_ids.empty());
}

TEST(AggregateBlocksTest, StackedFragmentsMerge) {
  const std::vector<Region> regions = {
      {0, {100, 100, 900, 150}, LayoutTag::kPlainText, std::string("one")},
      {1, {100, 160, 880, 220}, LayoutTag::kPlainText, std::nullopt},
      {2, {110, 240, 900, 300}, LayoutTag::kPlainText, std::string("three")},
  };
  const auto blocks = AggregateBlocks(regions, kPage);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].bbox, (BBox{100, 100, 900, 300}));
  EXPECT_EQ(blocks[0].member_region_ids, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(blocks[0].text, "one\nthree");
}

TEST(AggregateBlocksTest, FigureWithCaption) {
  const std::vector<Region> regions = {
      {0, {0, 0, 100, 80}, LayoutTag::kFigure, std::nullopt},
      {1, {0, 82, 100, 95}, LayoutTag::kFigureCaption, std::nullopt},
  };
  const auto blocks = AggregateBlocks(regions, kPage);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].tag, LayoutTag::kFigure);
  EXPECT_EQ(blocks[0].bbox, (BBox{0, 0, 100, 95}));
  EXPECT_FALSE(blocks[0].text.has_value());
}

TEST(AggregateBlocksTest, EmptyPageYieldsOnlyTheAuxiliaryBlock) {
  const auto blocks = AggregateBlocks({}, kPage);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].id, 1);
  ASSERT_TRUE(blocks[0].auxiliary());
  EXPECT_TRUE(blocks[0].mask_of->empty());
}

TEST(AggregateBlocksTest, BlocksOrderedBySmallestMember) {
  // Region 2 chains into region 0 through an overlap; region 1 stands alone.
  const std::vector<Region> regions = {
      {0, {0, 0, 400, 100}, LayoutTag::kTable, std::nullopt},
      {1, {500, 0, 900, 60}, LayoutTag::kPlainText, std::nullopt},
      {2, {0, 110, 400, 140}, LayoutTag::kTableFootnote, std::nullopt},
  };
  const auto blocks = AggregateBlocks(regions, kPage);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0].member_region_ids, (std::vector<int>{0, 2}));
  EXPECT_EQ(blocks[1].member_region_ids, (std::vector<int>{1}));
  EXPECT_EQ(blocks[0].id, 1);
  EXPECT_EQ(blocks[1].id, 2);
}

TEST(AggregateBlocksTest, AbandonRegionsStayAsBlocks) {
  const std::vector<Region> regions = {
      {0, {0, 0, 1000, 20}, LayoutTag::kAbandon, std::nullopt},
      {1, {100, 100, 900, 200}, LayoutTag::kPlainText, std::nullopt},
  };
  const auto blocks = AggregateBlocks(regions, kPage);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0].tag, LayoutTag::kAbandon);
}

TEST(AggregateBlocksTest, RejectsBrokenPreconditions) {
  const std::vector<Region> unordered = {
      {1, {0, 0, 10, 10}, LayoutTag::kPlainText, std::nullopt},
      {0, {0, 20, 10, 30}, LayoutTag::kPlainText, std::nullopt},
  };
  EXPECT_THROW(AggregateBlocks(unordered, kPage), ContractError);
  const std::vector<Region> outside = {
      {0, {0, 0, 1200, 10}, LayoutTag::kPlainText, std::nullopt}};
  EXPECT_THROW(AggregateBlocks(outside, kPage), ContractError);
  const std::vector<Region> reserved = {
      {0, {0, 0, 10, 10}, LayoutTag::kMaskedPage, std::nullopt}};
  EXPECT_THROW(AggregateBlocks(reserved, kPage), ContractError);
}

TEST(AggregateBlocksProperty, PartitionEnclosureAndOracleEquivalence) {
  verify::Rng rng(21);
  const AggregationConfig cfg;
  for (int n = 0; n < 300; ++n) {
    const auto regions = verify::RandomRegions(rng, 30, kPage);
    const auto blocks = AggregateBlocks(regions, kPage, cfg);
    std::vector<std::vector<int>> got;
    std::vector<int> all_ids;
    for (const Block& b : blocks) {
      if (b.auxiliary()) continue;
      got.push_back(b.member_region_ids);
      all_ids.insert(all_ids.end(), b.member_region_ids.begin(),
                     b.member_region_ids.end());
      BBox hull = regions[static_cast<std::size_t>(b.member_region_ids[0])].bbox;
      std::vector<LayoutTag> tags;
      for (int id : b.member_region_ids) {
        hull = hull.united(regions[static_cast<std::size_t>(id)].bbox);
        tags.push_back(regions[static_cast<std::size_t>(id)].tag);
      }
      EXPECT_EQ(hull, b.bbox);
      EXPECT_EQ(b.tag, TagPriority(tags, cfg));
    }
    std::sort(all_ids.begin(), all_ids.end());
    std::vector<int> expected_ids;
    for (const auto& r : regions) expected_ids.push_back(r.id);
    EXPECT_EQ(all_ids, expected_ids);
    EXPECT_EQ(got, verify::UnionFindComponents(regions, cfg));
    EXPECT_EQ(blocks.back().mask_of->size(), got.size());
  }
}

TEST(AggregateBlocksProperty, LoweringOverlapThresholdNeverAddsBlocks) {
  verify::Rng rng(22);
  for (int n = 0; n < 100; ++n) {
    const auto regions = verify::RandomRegions(rng, 30, kPage);
    AggregationConfig cfg;
    std::size_t previous = AggregateBlocks(regions, kPage, cfg).size();
    for (double tau_o = 0.9; tau_o >= 0.0; tau_o -= 0.1) {
      cfg.tau_o = std::max(0.0, tau_o);
      const std::size_t now = AggregateBlocks(regions, kPage, cfg).size();
      EXPECT_LE(now, previous);
      previous = now;
    }
  }
}

TEST(AggregateBlocksProperty, DuplicatingARegionNeverAddsBlocks) {
  verify::Rng rng(23);
  for (int n = 0; n < 200; ++n) {
    auto regions = verify::RandomRegions(rng, 20, kPage);
    if (regions.empty()) continue;
    const std::size_t before = AggregateBlocks(regions, kPage).size();
    // A copy overlaps its source completely, so it is force-merged with it.
    const std::size_t src = verify::UniformIndex(rng, regions.size());
    Region copy = regions[src];
    copy.tag = kDetectorTags[verify::UniformIndex(rng, kDetectorTags.size())];
    copy.id = static_cast<int>(regions.size());
    regions.push_back(copy);
    EXPECT_LE(AggregateBlocks(regions, kPage).size(), before);
  }
}

TEST(AggregateBlocksProperty, Deterministic) {
  verify::Rng rng(24);
  for (int n = 0; n < 50; ++n) {
    const auto regions = verify::RandomRegions(rng, 30, kPage);
    const auto a = AggregateBlocks(regions, kPage);
    const auto b = AggregateBlocks(regions, kPage);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].bbox, b[i].bbox);
      EXPECT_EQ(a[i].member_region_ids, b[i].member_region_ids);
      EXPECT_EQ(a[i].tag, b[i].tag);
    }
  }
}

}  // namespace
}  // namespace layoutret
