#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iceseg/grid.hpp"
#include "iceseg/labels.hpp"
#include "iceseg/rng.hpp"

namespace iceseg {

inline constexpr std::array<int, 6> kSupportedPatchSizes = {256, 384, 512, 640, 800, 1000};
inline constexpr int kMinPatchSize = 32;

struct StrideRange {
  double min_frac = 0.10;
  double max_frac = 0.40;
};

struct WindowOrigin {
  int row = 0;
  int col = 0;

  friend bool operator==(const WindowOrigin&, const WindowOrigin&) = default;
};

struct AugmentParams {
  int patch_size = 640;
  double stride_frac_min = 0.10;
  double stride_frac_max = 0.40;
  double rotation_min = 15.0;
  double rotation_max = 345.0;
  int rotation_bands = 4;
  int angles_per_band = 1;
  bool flips = true;
  std::uint64_t seed = 0;

  StrideRange stride() const { return {stride_frac_min, stride_frac_max}; }

  /// Half-open angle interval [lo, hi) of rotation band `b`.
  std::pair<double, double> band(int b) const;

  /// Throws InvalidArgument when any invariant is violated.
  void validate() const;
};

/// Inclusive integer stride bounds [ceil(min*K), floor(max*K)], at least 1.
std::pair<int, int> stride_bounds(int patch_size, StrideRange range);

/// Origins along one axis: 0, then random strides while the window fits,
/// then a final origin flush with the far border.
std::vector<int> plan_axis(int length, int patch_size, StrideRange range, Rng& rng);

/// Cartesian product of row and column origins in row-major order. Rows and
/// columns draw from independent child streams of `rng`. Throws PatchTooLarge.
std::vector<WindowOrigin> plan_windows(int height, int width, int patch_size, StrideRange range,
                                       const Rng& rng);

/// Size (rows, cols) of the largest axis-aligned rectangle inside a
/// rows x cols frame rotated by `degrees`.
std::pair<int, int> inscribed_rect_size(int rows, int cols, double degrees);

struct LabeledImage {
  RgbImage image;
  LabelMask labels;
};

/// Rotates image (bilinear) and labels (nearest neighbour) about the frame
/// centre, counter-clockwise as displayed, then crops the largest inscribed
/// rectangle. Throws DegenerateCrop or InvalidArgument.
LabeledImage rotate_and_crop(const RgbImage& image, const LabelMask& labels, double degrees);

enum class Flip : std::uint8_t { None, Horizontal, Vertical };

/// File-name code: 'f' (as is), 'h' or 'v'.
char flip_code(Flip f) noexcept;
Flip parse_flip(char code);

struct PatchProvenance {
  std::string source;
  int row = 0;
  int col = 0;
  std::optional<double> angle;  // degrees; empty for the unrotated pass
  Flip flip = Flip::None;

  friend bool operator==(const PatchProvenance&, const PatchProvenance&) = default;
};

/// A K x K training patch. Patches produced by augmentation are lightweight
/// views into a shared (possibly rotated) frame, with the flip applied on
/// access; image() and labels() materialize the pixels.
class Patch {
 public:
  Patch(std::shared_ptr<const LabeledImage> frame, WindowOrigin origin, int size,
        PatchProvenance provenance);

  /// A patch that owns already-flipped pixels, e.g. one read back from disk.
  static Patch owned(RgbImage image, LabelMask labels, PatchProvenance provenance);

  int size() const noexcept { return size_; }
  const PatchProvenance& provenance() const noexcept { return provenance_; }

  Rgb pixel(int r, int c) const noexcept {
    map(r, c);
    return frame_->image(r, c);
  }
  ClassId label(int r, int c) const noexcept {
    map(r, c);
    return frame_->labels(r, c);
  }

  RgbImage image() const;
  LabelMask labels() const;

 private:
  Patch() = default;

  void map(int& r, int& c) const noexcept {
    if (view_flip_ == Flip::Horizontal) c = size_ - 1 - c;
    if (view_flip_ == Flip::Vertical) r = size_ - 1 - r;
    r += origin_.row;
    c += origin_.col;
  }

  std::shared_ptr<const LabeledImage> frame_;
  WindowOrigin origin_;
  int size_ = 0;
  Flip view_flip_ = Flip::None;
  PatchProvenance provenance_;
};

using PatchSet = std::vector<Patch>;

/// Unrotated, unflipped sliding-window patches of one frame. Windows that
/// contain Void labels are skipped. Throws PatchTooLarge.
PatchSet sliding_window_patches(const std::string& source, const RgbImage& image,
                                const LabelMask& labels, int patch_size, StrideRange range,
                                const Rng& rng);

/// Full augmentation of one frame: the unrotated pass plus `angles_per_band`
/// random rotations per band, each window expanded with its horizontal and
/// vertical flips. Rotated variants too small for a window are skipped.
/// RNG streams are keyed by (seed, source, band), so results for one source
/// do not depend on any other source. Throws PatchTooLarge.
PatchSet augment_image(const std::string& source, const RgbImage& image, const LabelMask& labels,
                       const AugmentParams& params);

/// The angles augment_image uses for `source`, in band order.
std::vector<double> draw_rotation_angles(const std::string& source, const AugmentParams& params);

// ---------------------------------------------------------------------------
// Pixel selection

struct SelectedPixel {
  int row = 0;
  int col = 0;
  ClassId cls = ClassId::Water;

  friend bool operator==(const SelectedPixel&, const SelectedPixel&) = default;
};

struct PixelSelection {
  std::vector<SelectedPixel> entries;
  std::array<std::size_t, kNumClasses> counts_per_class{};

  bool empty() const noexcept { return entries.empty(); }
};

enum class SelectionPolicy {
  Discard,  // whole unit rejected when any class has fewer than n pixels
  TakeAll,  // classes with fewer than n pixels contribute all of them
};

/// Draws n pixels per class uniformly without replacement. Returns nullopt
/// for a discarded unit.
std::optional<PixelSelection> sample_class_balanced_pixels(const LabelMask& mask,
                                                           std::size_t n_per_class,
                                                           SelectionPolicy policy, Rng& rng);

std::optional<PixelSelection> sample_class_balanced_pixels(const Patch& patch,
                                                           std::size_t n_per_class,
                                                           SelectionPolicy policy, Rng& rng);

/// Same as above with per-class pixel counts already known, which avoids a
/// full scan when n is small relative to the class population.
std::optional<PixelSelection> sample_class_balanced_pixels(const Patch& patch,
                                                           const ClassCounts& counts,
                                                           std::size_t n_per_class,
                                                           SelectionPolicy policy, Rng& rng);

ClassCounts class_counts(const Patch& patch) noexcept;

}  // namespace iceseg
