#include "iceseg/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "iceseg/error.hpp"

namespace iceseg {

std::pair<double, double> AugmentParams::band(int b) const {
  const double width = (rotation_max - rotation_min) / rotation_bands;
  const double lo = rotation_min + b * width;
  const double hi = b + 1 == rotation_bands ? rotation_max : rotation_min + (b + 1) * width;
  return {lo, hi};
}

void AugmentParams::validate() const {
  if (patch_size < kMinPatchSize)
    throw InvalidArgument("patch size must be at least " + std::to_string(kMinPatchSize));
  if (!(stride_frac_min > 0.0 && stride_frac_min <= stride_frac_max && stride_frac_max <= 1.0))
    throw InvalidArgument("stride fractions must satisfy 0 < min <= max <= 1");
  if (!(rotation_min > 0.0 && rotation_min < rotation_max && rotation_max < 360.0))
    throw InvalidArgument("rotation range must satisfy 0 < min < max < 360");
  if (rotation_bands < 1) throw InvalidArgument("rotation_bands must be >= 1");
  if (angles_per_band < 0) throw InvalidArgument("angles_per_band must be >= 0");
}

std::pair<int, int> stride_bounds(int patch_size, StrideRange range) {
  int lo = static_cast<int>(std::ceil(range.min_frac * patch_size - 1e-9));
  int hi = static_cast<int>(std::floor(range.max_frac * patch_size + 1e-9));
  lo = std::max(lo, 1);
  hi = std::max(hi, lo);
  return {lo, hi};
}

std::vector<int> plan_axis(int length, int patch_size, StrideRange range, Rng& rng) {
  if (patch_size > length)
    throw PatchTooLarge("patch size " + std::to_string(patch_size) + " exceeds dimension " +
                        std::to_string(length));
  const auto [lo, hi] = stride_bounds(patch_size, range);
  const int last = length - patch_size;

  std::vector<int> origins{0};
  int pos = 0;
  while (true) {
    pos += static_cast<int>(rng.uniform_int(lo, hi));
    if (pos >= last) break;
    origins.push_back(pos);
  }
  if (origins.back() != last) origins.push_back(last);
  return origins;
}

std::vector<WindowOrigin> plan_windows(int height, int width, int patch_size, StrideRange range,
                                       const Rng& rng) {
  if (patch_size > height || patch_size > width)
    throw PatchTooLarge("patch size " + std::to_string(patch_size) + " exceeds frame " +
                        std::to_string(height) + "x" + std::to_string(width));
  Rng row_rng = rng.split(0);
  Rng col_rng = rng.split(1);
  const auto rows = plan_axis(height, patch_size, range, row_rng);
  const auto cols = plan_axis(width, patch_size, range, col_rng);

  std::vector<WindowOrigin> out;
  out.reserve(rows.size() * cols.size());
  for (int r : rows)
    for (int c : cols) out.push_back({r, c});
  return out;
}

namespace {

struct SinCos {
  double sin;
  double cos;
};

SinCos snapped_sincos(double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  double s = std::sin(rad);
  double c = std::cos(rad);
  if (std::abs(s) < 1e-12) s = 0.0;
  if (std::abs(c) < 1e-12) c = 0.0;
  return {s, c};
}

}  // namespace

std::pair<int, int> inscribed_rect_size(int rows, int cols, double degrees) {
  if (rows <= 0 || cols <= 0) return {0, 0};
  const auto [s, c] = snapped_sincos(degrees);
  const double sin_a = std::abs(s);
  const double cos_a = std::abs(c);
  const double w = cols;
  const double h = rows;
  const bool width_is_longer = w >= h;
  const double side_long = width_is_longer ? w : h;
  const double side_short = width_is_longer ? h : w;

  double wr = 0.0;
  double hr = 0.0;
  if (side_short <= 2.0 * sin_a * cos_a * side_long || std::abs(sin_a - cos_a) < 1e-10) {
    // Two opposite corners of the rectangle touch the longer sides.
    const double x = 0.5 * side_short;
    if (width_is_longer) {
      wr = x / sin_a;
      hr = x / cos_a;
    } else {
      wr = x / cos_a;
      hr = x / sin_a;
    }
  } else {
    const double cos_2a = cos_a * cos_a - sin_a * sin_a;
    wr = (w * cos_a - h * sin_a) / cos_2a;
    hr = (h * cos_a - w * sin_a) / cos_2a;
  }
  const int out_rows = static_cast<int>(std::floor(hr + 1e-6));
  const int out_cols = static_cast<int>(std::floor(wr + 1e-6));
  return {std::max(out_rows, 0), std::max(out_cols, 0)};
}

LabeledImage rotate_and_crop(const RgbImage& image, const LabelMask& labels, double degrees) {
  if (!(degrees > 0.0 && degrees < 360.0))
    throw InvalidArgument("rotation angle must lie in (0, 360)");
  if (!image.same_shape(labels)) throw DimensionMismatch("image and mask sizes differ");
  if (image.empty()) throw EmptyInput("cannot rotate an empty image");

  const auto [out_rows, out_cols] = inscribed_rect_size(image.rows(), image.cols(), degrees);
  if (out_rows < 1 || out_cols < 1)
    throw DegenerateCrop("rotation by " + std::to_string(degrees) + " leaves no inscribed pixels");

  const auto [s, c] = snapped_sincos(degrees);
  const double src_cy = (image.rows() - 1) / 2.0;
  const double src_cx = (image.cols() - 1) / 2.0;
  const double dst_cy = (out_rows - 1) / 2.0;
  const double dst_cx = (out_cols - 1) / 2.0;
  const int max_r = image.rows() - 1;
  const int max_c = image.cols() - 1;

  LabeledImage out{RgbImage(out_rows, out_cols), LabelMask(out_rows, out_cols)};
  for (int r = 0; r < out_rows; ++r) {
    const double yd = r - dst_cy;
    for (int col = 0; col < out_cols; ++col) {
      const double xd = col - dst_cx;
      const double xs = std::clamp(c * xd - s * yd + src_cx, 0.0, static_cast<double>(max_c));
      const double ys = std::clamp(s * xd + c * yd + src_cy, 0.0, static_cast<double>(max_r));

      const int nr = std::clamp(static_cast<int>(std::lround(ys)), 0, max_r);
      const int nc = std::clamp(static_cast<int>(std::lround(xs)), 0, max_c);
      out.labels(r, col) = labels(nr, nc);

      const int x0 = static_cast<int>(std::floor(xs));
      const int y0 = static_cast<int>(std::floor(ys));
      const int x1 = std::min(x0 + 1, max_c);
      const int y1 = std::min(y0 + 1, max_r);
      const double fx = xs - x0;
      const double fy = ys - y0;
      auto lerp = [&](std::uint8_t Rgb::*ch) {
        const double top = (1 - fx) * image(y0, x0).*ch + fx * image(y0, x1).*ch;
        const double bot = (1 - fx) * image(y1, x0).*ch + fx * image(y1, x1).*ch;
        const double v = (1 - fy) * top + fy * bot;
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      };
      out.image(r, col) = Rgb{lerp(&Rgb::r), lerp(&Rgb::g), lerp(&Rgb::b)};
    }
  }
  return out;
}

char flip_code(Flip f) noexcept {
  switch (f) {
    case Flip::None: return 'f';
    case Flip::Horizontal: return 'h';
    case Flip::Vertical: return 'v';
  }
  return 'f';
}

Flip parse_flip(char code) {
  switch (code) {
    case 'f': return Flip::None;
    case 'h': return Flip::Horizontal;
    case 'v': return Flip::Vertical;
    default: throw InvalidArgument(std::string("unknown flip code '") + code + "'");
  }
}

Patch::Patch(std::shared_ptr<const LabeledImage> frame, WindowOrigin origin, int size,
             PatchProvenance provenance)
    : frame_(std::move(frame)),
      origin_(origin),
      size_(size),
      view_flip_(provenance.flip),
      provenance_(std::move(provenance)) {
  if (!frame_ || origin_.row < 0 || origin_.col < 0 ||
      origin_.row + size_ > frame_->image.rows() || origin_.col + size_ > frame_->image.cols())
    throw InvalidArgument("patch window lies outside its frame");
}

Patch Patch::owned(RgbImage image, LabelMask labels, PatchProvenance provenance) {
  if (image.rows() != image.cols() || !image.same_shape(labels) || image.empty())
    throw DimensionMismatch("patch image and labels must be equal and square");
  Patch p;
  p.size_ = image.rows();
  p.frame_ = std::make_shared<const LabeledImage>(LabeledImage{std::move(image), std::move(labels)});
  p.provenance_ = std::move(provenance);
  return p;
}

RgbImage Patch::image() const {
  RgbImage out(size_, size_);
  for (int r = 0; r < size_; ++r)
    for (int c = 0; c < size_; ++c) out(r, c) = pixel(r, c);
  return out;
}

LabelMask Patch::labels() const {
  LabelMask out(size_, size_);
  for (int r = 0; r < size_; ++r)
    for (int c = 0; c < size_; ++c) out(r, c) = label(r, c);
  return out;
}

namespace {

bool window_has_void(const LabelMask& labels, WindowOrigin o, int size) {
  for (int r = 0; r < size; ++r) {
    auto row = labels.row(o.row + r).subspan(o.col, size);
    if (std::find(row.begin(), row.end(), ClassId::Void) != row.end()) return true;
  }
  return false;
}

void emit_windows(const std::shared_ptr<const LabeledImage>& frame, const std::string& source,
                  std::optional<double> angle, int patch_size, StrideRange range, const Rng& rng,
                  bool flips, PatchSet& out) {
  const auto origins =
      plan_windows(frame->image.rows(), frame->image.cols(), patch_size, range, rng);
  for (const WindowOrigin& o : origins) {
    if (window_has_void(frame->labels, o, patch_size)) continue;
    out.emplace_back(frame, o, patch_size, PatchProvenance{source, o.row, o.col, angle, Flip::None});
    if (flips) {
      out.emplace_back(frame, o, patch_size,
                       PatchProvenance{source, o.row, o.col, angle, Flip::Horizontal});
      out.emplace_back(frame, o, patch_size,
                       PatchProvenance{source, o.row, o.col, angle, Flip::Vertical});
    }
  }
}

void check_frame(const RgbImage& image, const LabelMask& labels, int patch_size) {
  if (!image.same_shape(labels)) throw DimensionMismatch("image and mask sizes differ");
  if (patch_size > image.rows() || patch_size > image.cols())
    throw PatchTooLarge("patch size " + std::to_string(patch_size) + " exceeds frame " +
                        std::to_string(image.rows()) + "x" + std::to_string(image.cols()));
}

Rng band_stream(const Rng& base, int band, int copy) {
  return base.split(static_cast<std::uint64_t>(band) + 1).split(static_cast<std::uint64_t>(copy));
}

}  // namespace

PatchSet sliding_window_patches(const std::string& source, const RgbImage& image,
                                const LabelMask& labels, int patch_size, StrideRange range,
                                const Rng& rng) {
  check_frame(image, labels, patch_size);
  auto frame = std::make_shared<const LabeledImage>(LabeledImage{image, labels});
  PatchSet out;
  emit_windows(frame, source, std::nullopt, patch_size, range, rng, false, out);
  return out;
}

std::vector<double> draw_rotation_angles(const std::string& source, const AugmentParams& params) {
  params.validate();
  const Rng base = Rng::stream(params.seed, {stable_hash(source)});
  std::vector<double> angles;
  for (int b = 0; b < params.rotation_bands; ++b) {
    const auto [lo, hi] = params.band(b);
    for (int j = 0; j < params.angles_per_band; ++j) {
      Rng angle_rng = band_stream(base, b, j).split(0);
      angles.push_back(angle_rng.uniform(lo, hi));
    }
  }
  return angles;
}

PatchSet augment_image(const std::string& source, const RgbImage& image, const LabelMask& labels,
                       const AugmentParams& params) {
  params.validate();
  check_frame(image, labels, params.patch_size);

  const Rng base = Rng::stream(params.seed, {stable_hash(source)});
  const StrideRange range = params.stride();
  PatchSet out;

  auto original = std::make_shared<const LabeledImage>(LabeledImage{image, labels});
  emit_windows(original, source, std::nullopt, params.patch_size, range, base.split(0),
               params.flips, out);

  const std::vector<double> angles = draw_rotation_angles(source, params);
  std::size_t k = 0;
  for (int b = 0; b < params.rotation_bands; ++b) {
    for (int j = 0; j < params.angles_per_band; ++j, ++k) {
      const double angle = angles[k];
      const auto [rows, cols] = inscribed_rect_size(image.rows(), image.cols(), angle);
      if (rows < params.patch_size || cols < params.patch_size) continue;
      auto rotated =
          std::make_shared<const LabeledImage>(rotate_and_crop(image, labels, angle));
      emit_windows(rotated, source, angle, params.patch_size, range,
                   band_stream(base, b, j).split(1), params.flips, out);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <typename LabelAt>
std::optional<PixelSelection> sample_impl(int rows, int cols, LabelAt label_at,
                                          const ClassCounts& counts, std::size_t n_per_class,
                                          SelectionPolicy policy, Rng& rng) {
  if (n_per_class == 0) throw InvalidArgument("n_per_class must be positive");
  if (policy == SelectionPolicy::Discard) {
    for (std::uint64_t c : counts)
      if (c < n_per_class) return std::nullopt;
  }

  const std::uint64_t area = static_cast<std::uint64_t>(rows) * cols;
  PixelSelection sel;
  for (ClassId cls : kScoredClasses) {
    const std::uint64_t available = counts[index_of(cls)];
    const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(n_per_class, available));
    if (take == 0) continue;

    auto emit = [&](std::uint64_t idx) {
      sel.entries.push_back(
          {static_cast<int>(idx / cols), static_cast<int>(idx % cols), cls});
    };

    if (4 * static_cast<std::uint64_t>(take) <= available) {
      // Sparse draw: rejection sampling over pixel positions.
      std::unordered_set<std::uint64_t> chosen;
      chosen.reserve(take * 2);
      while (chosen.size() < take) {
        const std::uint64_t idx = rng.uniform_index(area);
        if (label_at(static_cast<int>(idx / cols), static_cast<int>(idx % cols)) != cls) continue;
        if (chosen.insert(idx).second) emit(idx);
      }
    } else {
      std::vector<std::uint64_t> pool;
      pool.reserve(available);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
          if (label_at(r, c) == cls) pool.push_back(static_cast<std::uint64_t>(r) * cols + c);
      for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(pool.size() - i));
        std::swap(pool[i], pool[j]);
        emit(pool[i]);
      }
    }
    sel.counts_per_class[index_of(cls)] = take;
  }
  return sel;
}

}  // namespace

std::optional<PixelSelection> sample_class_balanced_pixels(const LabelMask& mask,
                                                           std::size_t n_per_class,
                                                           SelectionPolicy policy, Rng& rng) {
  return sample_impl(
      mask.rows(), mask.cols(), [&](int r, int c) { return mask(r, c); }, class_counts(mask),
      n_per_class, policy, rng);
}

ClassCounts class_counts(const Patch& patch) noexcept {
  ClassCounts counts{};
  for (int r = 0; r < patch.size(); ++r)
    for (int c = 0; c < patch.size(); ++c) {
      const ClassId id = patch.label(r, c);
      if (is_scored(id)) ++counts[index_of(id)];
    }
  return counts;
}

std::optional<PixelSelection> sample_class_balanced_pixels(const Patch& patch,
                                                           const ClassCounts& counts,
                                                           std::size_t n_per_class,
                                                           SelectionPolicy policy, Rng& rng) {
  return sample_impl(
      patch.size(), patch.size(), [&](int r, int c) { return patch.label(r, c); }, counts,
      n_per_class, policy, rng);
}

std::optional<PixelSelection> sample_class_balanced_pixels(const Patch& patch,
                                                           std::size_t n_per_class,
                                                           SelectionPolicy policy, Rng& rng) {
  return sample_class_balanced_pixels(patch, class_counts(patch), n_per_class, policy, rng);
}

}  // namespace iceseg
