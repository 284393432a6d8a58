#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "iceseg/augment.hpp"
#include "iceseg/config.hpp"
#include "iceseg/grid.hpp"
#include "iceseg/labels.hpp"

namespace iceseg {

// Per-pixel features: R, G, B in [0, 1], luma, and the mean, standard
// deviation, minimum and maximum of luma over a 5x5 window mirrored at the
// borders.
inline constexpr int kNumFeatures = 8;
inline constexpr int kFeatureWindow = 5;

using FeatureVector = std::array<double, kNumFeatures>;
using FeatureGrid = Grid<FeatureVector>;

FeatureGrid extract_features(const RgbImage& image);

/// Features of one patch pixel, mirrored at the patch borders; identical to
/// extract_features(patch.image())(r, c).
FeatureVector features_at(const Patch& patch, int r, int c);

/// Multinomial logistic model: one row of weights per class, the last column
/// is the bias.
struct ModelParams {
  static constexpr int kCols = kNumFeatures + 1;
  std::array<std::array<double, kCols>, kNumClasses> w{};

  bool finite() const noexcept;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

std::array<double, kNumClasses> class_scores(const ModelParams& params, const FeatureVector& x) noexcept;
std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& scores) noexcept;

struct Sample {
  FeatureVector x{};
  ClassId label = ClassId::Water;
};

struct LossAndGrad {
  double loss = 0.0;
  ModelParams grad;
};

/// Mean softmax cross-entropy over `samples` plus (l2 / 2) * ||W||^2 on the
/// non-bias weights, with its exact gradient. Sums use a fixed pairwise tree,
/// so results do not depend on how the work is scheduled.
/// Throws EmptySelection.
LossAndGrad loss_and_grad(const ModelParams& params, std::span<const Sample> samples, double l2);

/// Same loss restricted to the selected pixels. Labels are read only at the
/// selected positions. Throws EmptySelection, or InvalidArgument for a
/// selected Void pixel.
LossAndGrad loss_and_grad(const ModelParams& params, const FeatureGrid& features,
                          const LabelMask& labels, const PixelSelection& selection, double l2);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 200;
  std::size_t batch_size = 4096;
  std::size_t n_per_class = 10000;
  SelectionPolicy policy = SelectionPolicy::Discard;
  /// Draw a fresh selection every epoch (balanced regime). When false, each
  /// patch keeps the selection drawn before the first epoch (selective-pixel
  /// regime: only those labels are ever seen).
  bool resample_each_epoch = true;
  std::uint64_t seed = 0;
  double l2 = 1e-4;

  void validate() const;

  /// Keys: learning_rate, epochs, batch_size, n_per_class, policy
  /// (discard|take_all), resample (true|false), seed, l2.
  static TrainConfig from_config(const KeyValueConfig& cfg);
};

struct TrainResult {
  ModelParams params;
  /// Loss over the epoch's selection after that epoch's updates.
  std::vector<double> epoch_loss;
  std::size_t units_used = 0;
  std::size_t units_discarded = 0;
};

using EpochCallback = std::function<void(int epoch, double loss)>;

/// Minibatch SGD from zero weights. Throws NoTrainableData when no patch
/// survives the selection policy.
TrainResult train(const PatchSet& patches, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Per-pixel argmax; ties go to the lower class id.
LabelMask predict(const ModelParams& params, const RgbImage& image);

/// Stride-K tiling, per-tile prediction, stitching.
LabelMask predict_tiled(const ModelParams& params, const RgbImage& image, int tile_size);

/// Parameter file: ASCII magic "ISTB1" followed by the 3 x 9 weights as
/// row-major little-endian IEEE-754 doubles.
void save_params(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace iceseg
