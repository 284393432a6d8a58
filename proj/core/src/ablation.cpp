#include "iceseg/ablation.hpp"

#include <algorithm>
#include <numeric>

#include "iceseg/error.hpp"
#include "iceseg/rng.hpp"

namespace iceseg {

std::vector<std::size_t> subset_order(std::size_t pool, std::uint64_t seed) {
  std::vector<std::size_t> order(pool);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::stream(seed, {0x737562736574});  // "subset"
  rng.shuffle(order);
  return order;
}

std::vector<std::size_t> nested_subset(std::size_t pool, std::size_t count, std::uint64_t seed) {
  if (count == 0 || count > pool)
    throw InsufficientPool("subset of " + std::to_string(count) + " from a pool of " +
                           std::to_string(pool));
  std::vector<std::size_t> order = subset_order(pool, seed);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

PatchSet build_training_set(std::span<const LabeledFrame> frames, const AugmentParams& params) {
  PatchSet all;
  for (const LabeledFrame& f : frames) {
    PatchSet ps = augment_image(f.name, f.image, f.labels, params);
    std::move(ps.begin(), ps.end(), std::back_inserter(all));
  }
  return all;
}

TrainResult train_on_frames(std::span<const LabeledFrame> frames, const AugmentParams& augment,
                            const TrainConfig& config) {
  return train(build_training_set(frames, augment), config);
}

ConfusionMatrix evaluate_model(const ModelParams& params, std::span<const LabeledFrame> test,
                               int tile_size) {
  ConfusionMatrix cm;
  for (const LabeledFrame& f : test) cm += confusion(f.labels, predict_tiled(params, f.image, tile_size));
  return cm;
}

namespace {

std::vector<LabeledFrame> pick(std::span<const LabeledFrame> pool,
                               const std::vector<std::size_t>& idx) {
  std::vector<LabeledFrame> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(pool[i]);
  return out;
}

AblationRow score(std::size_t count, const TrainResult& trained, std::span<const LabeledFrame> test,
                  int tile_size, std::vector<std::size_t> subset) {
  AblationRow row;
  row.count = count;
  row.training_units = trained.units_used;
  row.discarded_units = trained.units_discarded;
  row.confusion = evaluate_model(trained.params, test, tile_size);
  row.metrics = compute_metrics(row.confusion);
  row.subset = std::move(subset);
  return row;
}

}  // namespace

std::vector<AblationRow> ablate_images(std::span<const LabeledFrame> pool,
                                       std::span<const LabeledFrame> test,
                                       std::span<const std::size_t> counts,
                                       const AugmentParams& augment, const TrainConfig& config,
                                       std::uint64_t subset_seed) {
  if (test.empty()) throw EmptyInput("ablation needs a non-empty test set");
  for (std::size_t n : counts)
    if (n == 0 || n > pool.size())
      throw InsufficientPool("subset of " + std::to_string(n) + " from a pool of " +
                             std::to_string(pool.size()));

  std::vector<AblationRow> rows;
  for (std::size_t n : counts) {
    auto idx = nested_subset(pool.size(), n, subset_seed);
    const auto frames = pick(pool, idx);
    const TrainResult trained = train_on_frames(frames, augment, config);
    rows.push_back(score(n, trained, test, augment.patch_size, std::move(idx)));
  }
  return rows;
}

std::vector<AblationRow> ablate_pixels(std::span<const LabeledFrame> pool,
                                       std::span<const LabeledFrame> test,
                                       std::span<const std::size_t> counts,
                                       const PixelAblationSettings& settings,
                                       const TrainConfig& config) {
  if (test.empty()) throw EmptyInput("ablation needs a non-empty test set");
  auto idx = nested_subset(pool.size(), settings.training_images, settings.seed);

  PatchSet patches;
  for (std::size_t i : idx) {
    const LabeledFrame& f = pool[i];
    const Rng rng = Rng::stream(settings.seed, {stable_hash(f.name)});
    PatchSet ps = sliding_window_patches(f.name, f.image, f.labels, settings.patch_size,
                                         settings.stride, rng);
    std::move(ps.begin(), ps.end(), std::back_inserter(patches));
  }

  std::vector<AblationRow> rows;
  for (std::size_t n : counts) {
    TrainConfig cfg = config;
    cfg.n_per_class = n;
    cfg.policy = SelectionPolicy::TakeAll;
    cfg.resample_each_epoch = false;
    const TrainResult trained = train(patches, cfg);
    rows.push_back(score(n, trained, test, settings.patch_size, idx));
  }
  return rows;
}

}  // namespace iceseg
