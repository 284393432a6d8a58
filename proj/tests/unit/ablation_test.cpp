#include "iceseg/ablation.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "iceseg/error.hpp"
#include "iceseg/synth.hpp"

namespace iceseg {
namespace {

std::vector<LabeledFrame> synthetic_frames(int n, std::uint64_t seed, const std::string& prefix) {
  std::vector<LabeledFrame> out;
  for (int i = 0; i < n; ++i) {
    SceneSpec s;
    s.rows = s.cols = 80;
    s.n_frazil_pans = 3;
    s.n_anchor_pans = 3;
    s.radius_min = 6;
    s.radius_max = 16;
    s.noise_std = 4;
    s.seed = seed + static_cast<std::uint64_t>(i);
    LabeledImage scene = generate_scene(s);
    out.push_back({prefix + std::to_string(i), std::move(scene.image), std::move(scene.labels)});
  }
  return out;
}

AugmentParams small_augment() {
  AugmentParams a;
  a.patch_size = 32;
  a.seed = 21;
  return a;
}

TrainConfig small_config() {
  TrainConfig c;
  c.epochs = 3;
  c.n_per_class = 8;
  c.batch_size = 64;
  c.policy = SelectionPolicy::TakeAll;
  c.seed = 5;
  return c;
}

TEST(NestedSubset, LargerSubsetsContainSmallerOnes) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::vector<std::size_t> prev;
    for (std::size_t n : {4u, 8u, 16u, 24u, 32u}) {
      const auto s = nested_subset(32, n, seed);
      ASSERT_EQ(s.size(), n);
      ASSERT_TRUE(std::is_sorted(s.begin(), s.end()));
      ASSERT_TRUE(std::includes(s.begin(), s.end(), prev.begin(), prev.end()));
      prev = s;
    }
    std::vector<std::size_t> all(32);
    for (std::size_t i = 0; i < 32; ++i) all[i] = i;
    EXPECT_EQ(prev, all);
  }
}

TEST(NestedSubset, Errors) {
  EXPECT_THROW(nested_subset(5, 6, 0), InsufficientPool);
  EXPECT_THROW(nested_subset(5, 0, 0), InsufficientPool);
}

TEST(AblateImages, SingleCountEqualsPlainTraining) {
  const auto pool = synthetic_frames(6, 100, "p");
  const auto test = synthetic_frames(2, 200, "t");
  const std::vector<std::size_t> counts = {4};
  const auto rows = ablate_images(pool, test, counts, small_augment(), small_config(), 9);
  ASSERT_EQ(rows.size(), 1u);

  std::vector<LabeledFrame> chosen;
  for (std::size_t i : nested_subset(pool.size(), 4, 9)) chosen.push_back(pool[i]);
  const TrainResult plain = train_on_frames(chosen, small_augment(), small_config());
  EXPECT_EQ(rows[0].confusion, evaluate_model(plain.params, test, 32));
  EXPECT_EQ(rows[0].training_units, plain.units_used);
}

TEST(AblateImages, FullPoolEqualsNonAblatedRun) {
  const auto pool = synthetic_frames(5, 300, "p");
  const auto test = synthetic_frames(2, 400, "t");
  const std::vector<std::size_t> counts = {2, 5};
  const auto rows = ablate_images(pool, test, counts, small_augment(), small_config(), 3);
  ASSERT_EQ(rows.size(), 2u);
  const TrainResult full = train_on_frames(pool, small_augment(), small_config());
  EXPECT_EQ(rows[1].confusion, evaluate_model(full.params, test, 32));
  EXPECT_EQ(rows[1].count, 5u);
  EXPECT_TRUE(std::includes(rows[1].subset.begin(), rows[1].subset.end(), rows[0].subset.begin(),
                            rows[0].subset.end()));
}

TEST(AblateImages, RejectsOversizedCounts) {
  const auto pool = synthetic_frames(2, 500, "p");
  const auto test = synthetic_frames(1, 600, "t");
  const std::vector<std::size_t> counts = {3};
  EXPECT_THROW(ablate_images(pool, test, counts, small_augment(), small_config(), 0), InsufficientPool);
}

TEST(AblatePixels, OneRowPerCount) {
  const auto pool = synthetic_frames(4, 700, "p");
  const auto test = synthetic_frames(1, 800, "t");
  const std::vector<std::size_t> counts = {2, 10, 100, 1000};
  PixelAblationSettings settings;
  settings.training_images = 2;
  settings.patch_size = 32;
  settings.seed = 4;
  const auto rows = ablate_pixels(pool, test, counts, settings, small_config());
  ASSERT_EQ(rows.size(), counts.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].count, counts[i]);
    EXPECT_EQ(rows[i].confusion.total(), 80u * 80u);
    EXPECT_EQ(rows[i].subset.size(), 2u);
  }
}

}  // namespace
}  // namespace iceseg
