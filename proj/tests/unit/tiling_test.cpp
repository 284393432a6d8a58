#include "iceseg/tiling.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace iceseg {
namespace {

using testing::random_image;
using testing::random_mask;

TEST(TileLayout, FullHdFrameAtK640) {
  const TileLayout l = make_tile_layout(1080, 1280, 640);
  EXPECT_EQ(l.padded_rows, 1280);
  EXPECT_EQ(l.padded_cols, 1280);
  EXPECT_EQ(l.origins.size(), 4u);
}

TEST(TileLayout, ExactFitNeedsNoPadding) {
  const TileLayout l = make_tile_layout(256, 256, 256);
  EXPECT_EQ(l.padded_rows, 256);
  EXPECT_EQ(l.padded_cols, 256);
  ASSERT_EQ(l.origins.size(), 1u);
}

TEST(TileLayout, CeilingArithmetic) {
  const TileLayout l = make_tile_layout(100, 100, 64);
  EXPECT_EQ(l.padded_rows, 128);
  EXPECT_EQ(l.padded_cols, 128);
  EXPECT_EQ(l.origins, (std::vector<WindowOrigin>{{0, 0}, {0, 64}, {64, 0}, {64, 64}}));
}

TEST(TileLayout, OriginsCoverPaddedFrameWithoutOverlap) {
  for (int k : {7, 32, 100}) {
    const TileLayout l = make_tile_layout(333, 517, k);
    EXPECT_EQ(l.padded_rows % k, 0);
    EXPECT_GE(l.padded_rows, 333);
    EXPECT_LT(l.padded_rows - 333, k);
    Grid<int> hits(l.padded_rows, l.padded_cols, 0);
    for (const auto& o : l.origins)
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) ++hits(o.row + r, o.col + c);
    for (int v : hits.values()) ASSERT_EQ(v, 1);
  }
}

TEST(Tile, ReflectsAtRaggedBorder) {
  GrayImage g(1, 3, std::vector<std::uint8_t>{1, 2, 3});
  const auto t = tile(g, 4);
  ASSERT_EQ(t.tiles.size(), 1u);
  // Row 0 = [1 2 3 2]; row 1 mirrors row 0 for a single-row frame.
  EXPECT_EQ(t.tiles[0](0, 3), 2);
  EXPECT_EQ(t.tiles[0](3, 0), 1);
}

TEST(Tile, MirroringWorksForPadsLargerThanTheFrame) {
  GrayImage g(2, 2, std::vector<std::uint8_t>{1, 2, 3, 4});
  const auto t = tile(g, 7);
  EXPECT_EQ(t.tiles[0](0, 6), 1);   // period 2: 1 2 1 2 1 2 1
  EXPECT_EQ(t.tiles[0](5, 0), 3);
}

TEST(Stitch, RoundTripIsBitExact) {
  Rng rng(1);
  for (int k : {16, 50, 64}) {
    for (auto [rows, cols] : {std::pair{64, 64}, std::pair{100, 37}, std::pair{1, 1}, std::pair{130, 129}}) {
      const LabelMask m = random_mask(rows, cols, rng, 0.05);
      const auto t = tile(m, k);
      EXPECT_EQ(stitch(t.tiles, t.layout), m) << rows << "x" << cols << " K=" << k;
      const RgbImage img = random_image(rows, cols, rng);
      const auto ti = tile(img, k);
      EXPECT_EQ(stitch(ti.tiles, ti.layout), img);
    }
  }
}

TEST(Stitch, UniformTilesMakeQuadrants) {
  const TileLayout l = make_tile_layout(4, 4, 2);
  std::vector<LabelMask> tiles = {LabelMask(2, 2, ClassId::Water), LabelMask(2, 2, ClassId::Anchor),
                                  LabelMask(2, 2, ClassId::Frazil), LabelMask(2, 2, ClassId::Void)};
  const LabelMask out = stitch(tiles, l);
  using enum ClassId;
  const LabelMask expected(4, 4, std::vector<ClassId>{Water, Water, Anchor, Anchor,  //
                                                      Water, Water, Anchor, Anchor,  //
                                                      Frazil, Frazil, Void, Void,    //
                                                      Frazil, Frazil, Void, Void});
  EXPECT_EQ(out, expected);
}

TEST(Stitch, LayoutMismatch) {
  const TileLayout l = make_tile_layout(100, 100, 64);
  std::vector<LabelMask> three(3, LabelMask(64, 64));
  EXPECT_THROW(stitch(three, l), LayoutMismatch);
  std::vector<LabelMask> wrong_size(4, LabelMask(32, 32));
  EXPECT_THROW(stitch(wrong_size, l), LayoutMismatch);
}

TEST(Tile, EmptyFrame) {
  EXPECT_THROW(tile(LabelMask{}, 8), EmptyInput);
}

}  // namespace
}  // namespace iceseg
