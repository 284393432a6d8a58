#include "iceseg/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "iceseg/concentration.hpp"
#include "iceseg/error.hpp"

namespace iceseg {
namespace {

SceneSpec small_spec(std::uint64_t seed) {
  SceneSpec s;
  s.rows = 96;
  s.cols = 128;
  s.n_frazil_pans = 5;
  s.n_anchor_pans = 4;
  s.radius_min = 6;
  s.radius_max = 20;
  s.seed = seed;
  return s;
}

TEST(GenerateScene, NoPansIsAllWater) {
  SceneSpec s = small_spec(1);
  s.n_frazil_pans = s.n_anchor_pans = 0;
  const LabeledImage scene = generate_scene(s);
  for (ClassId c : scene.labels.values()) ASSERT_EQ(c, ClassId::Water);
  EXPECT_EQ(conc_vector(scene.labels, IceClassSet::Combined).values, std::vector<double>(128, 0.0));
}

TEST(GenerateScene, DiskAreaMatchesAnalyticArea) {
  for (double r : {2.0, 5.0, 12.5, 30.0, 60.0}) {
    SceneSpec s;
    s.rows = s.cols = 160;
    Pan p;
    p.cls = ClassId::Frazil;
    p.center_row = 80.3;
    p.center_col = 79.6;
    p.radius_row = p.radius_col = r;
    p.intensity = 230;
    const LabeledImage scene = render_scene(s, {p});
    const double count = static_cast<double>(class_counts(scene.labels)[2]);
    EXPECT_NEAR(count, std::numbers::pi * r * r, 4.0 * r) << "r=" << r;
  }
}

TEST(GenerateScene, FrequenciesMatchPaintedCounts) {
  const LabeledImage scene = generate_scene(small_spec(2));
  std::array<std::uint64_t, 3> painted{};
  for (ClassId c : scene.labels.values()) ++painted[index_of(c)];
  const std::vector<LabelMask> one = {scene.labels};
  const auto freq = class_frequencies(one);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(freq[k], static_cast<double>(painted[k]) / (96.0 * 128.0));
}

TEST(GenerateScene, NoVoidAndIntensityBandsWithoutNoise) {
  const SceneSpec s = small_spec(3);
  const LabeledImage scene = generate_scene(s);
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      const ClassId cls = scene.labels(r, c);
      ASSERT_NE(cls, ClassId::Void);
      const int g = scene.image(r, c).g;
      const IntensityBand band = cls == ClassId::Water ? s.water : cls == ClassId::Anchor ? s.anchor : s.frazil;
      // green carries the base level, shifted by at most 2 for anchor tint
      ASSERT_GE(g, band.lo) << r << "," << c;
      ASSERT_LE(g, band.hi + 2) << r << "," << c;
    }
  }
}

TEST(GenerateScene, DeterministicUnderSeed) {
  SceneSpec s = small_spec(4);
  s.noise_std = 8.0;
  const LabeledImage a = generate_scene(s), b = generate_scene(s);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.labels, b.labels);
  s.seed = 5;
  EXPECT_NE(generate_scene(s).labels, a.labels);
}

TEST(GenerateScene, NoiseLeavesLabelsUntouched) {
  SceneSpec s = small_spec(6);
  const LabeledImage clean = generate_scene(s);
  s.noise_std = 20.0;
  const LabeledImage noisy = generate_scene(s);
  EXPECT_EQ(clean.labels, noisy.labels);
  EXPECT_NE(clean.image, noisy.image);
}

TEST(SceneSpec, Validation) {
  SceneSpec s;
  s.radius_min = 1.0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = SceneSpec{};
  s.anchor = {50, 160};
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = SceneSpec{};
  s.drift = -1;
  EXPECT_THROW(s.validate(), InvalidArgument);
  EXPECT_NO_THROW(SceneSpec{}.validate());
}

TEST(GenerateSequence, TwoFramesSameSize) {
  const auto frames = generate_sequence(small_spec(7), 2);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_TRUE(frames[0].labels.same_shape(frames[1].labels));
  EXPECT_TRUE(frames[0].image.same_shape(frames[1].image));
  EXPECT_THROW(generate_sequence(small_spec(7), 1), TooFewFrames);
}

TEST(GenerateSequence, IntegerDriftTranslatesLabelsWithWraparound) {
  SceneSpec s = small_spec(8);
  s.drift = 3;
  const auto frames = generate_sequence(s, 3);
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c)
      ASSERT_EQ(frames[2].labels(r, (c + 6) % s.cols), frames[0].labels(r, c));
}

std::vector<LabelMask> masks_of(const std::vector<LabeledImage>& frames) {
  std::vector<LabelMask> out;
  for (const auto& f : frames) out.push_back(f.labels);
  return out;
}

TEST(GenerateSequence, ConsistencyOrderedByDrift) {
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    SceneSpec s = small_spec(seed);
    s.drift = 0;
    EXPECT_EQ(temporal_consistency(masks_of(generate_sequence(s, 5)), IceClassSet::Combined), 0.0);
    s.drift = 1;
    const double slow = temporal_consistency(masks_of(generate_sequence(s, 5)), IceClassSet::Combined);
    s.drift = 20;
    const double fast = temporal_consistency(masks_of(generate_sequence(s, 5)), IceClassSet::Combined);
    EXPECT_GT(slow, 0.0);
    EXPECT_LT(slow, fast);
  }
}

}  // namespace
}  // namespace iceseg
