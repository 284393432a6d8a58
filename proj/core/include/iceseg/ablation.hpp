#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iceseg/augment.hpp"
#include "iceseg/classifier.hpp"
#include "iceseg/labels.hpp"
#include "iceseg/metrics.hpp"

namespace iceseg {

struct LabeledFrame {
  std::string name;
  RgbImage image;
  LabelMask labels;
};

/// Seeded permutation of [0, pool); prefixes of it are the nested subsets.
std::vector<std::size_t> subset_order(std::size_t pool, std::uint64_t seed);

/// First `count` entries of subset_order, returned in ascending pool order so
/// that the full-pool subset is the pool itself. Throws InsufficientPool.
std::vector<std::size_t> nested_subset(std::size_t pool, std::size_t count, std::uint64_t seed);

/// Augments every frame (keyed by its name) and concatenates the patch sets.
PatchSet build_training_set(std::span<const LabeledFrame> frames, const AugmentParams& params);

/// Trains on augmented patches of `frames`.
TrainResult train_on_frames(std::span<const LabeledFrame> frames, const AugmentParams& augment,
                            const TrainConfig& config);

/// Pooled confusion matrix of stride-K tiled predictions over `test`.
ConfusionMatrix evaluate_model(const ModelParams& params, std::span<const LabeledFrame> test,
                               int tile_size);

struct AblationRow {
  std::size_t count = 0;         // images, or pixels per class
  std::size_t training_units = 0;
  std::size_t discarded_units = 0;
  ConfusionMatrix confusion;
  SegMetrics metrics;            // three-class view
  std::vector<std::size_t> subset;
};

/// One trained model per subset size, scored on the fixed test set. Subsets
/// are nested: subset(a) is contained in subset(b) for a < b.
std::vector<AblationRow> ablate_images(std::span<const LabeledFrame> pool,
                                       std::span<const LabeledFrame> test,
                                       std::span<const std::size_t> counts,
                                       const AugmentParams& augment, const TrainConfig& config,
                                       std::uint64_t subset_seed);

struct PixelAblationSettings {
  std::size_t training_images = 4;  // nested subset of the pool
  int patch_size = 640;
  StrideRange stride;
  std::uint64_t seed = 0;
};

/// Selective-pixel ablation: unaugmented sliding-window patches from a small
/// subset of the pool; for each count n, the loss sees only n labels per class
/// per patch (fixed for the whole run, TakeAll policy).
std::vector<AblationRow> ablate_pixels(std::span<const LabeledFrame> pool,
                                       std::span<const LabeledFrame> test,
                                       std::span<const std::size_t> counts,
                                       const PixelAblationSettings& settings,
                                       const TrainConfig& config);

}  // namespace iceseg
