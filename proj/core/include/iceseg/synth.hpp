#pragma once

#include <cstdint>
#include <vector>

#include "iceseg/augment.hpp"
#include "iceseg/grid.hpp"
#include "iceseg/labels.hpp"

namespace iceseg {

struct IntensityBand {
  int lo = 0;
  int hi = 0;
};

/// Synthetic river scene: elliptical anchor and frazil pans over water.
struct SceneSpec {
  int rows = 512;
  int cols = 512;
  int n_frazil_pans = 10;
  int n_anchor_pans = 8;
  double radius_min = 12.0;
  double radius_max = 60.0;
  IntensityBand water{10, 60};
  IntensityBand anchor{100, 160};
  IntensityBand frazil{200, 255};
  double noise_std = 0.0;
  double drift = 0.0;  // pixels per frame, to the right, wrapping around
  std::uint64_t seed = 0;

  /// Throws InvalidArgument.
  void validate() const;
};

struct Pan {
  ClassId cls = ClassId::Frazil;
  double center_row = 0.0;
  double center_col = 0.0;
  double radius_row = 1.0;  // semi-axes before rotation
  double radius_col = 1.0;
  double angle = 0.0;       // radians
  std::uint8_t intensity = 0;
};

/// Random pan layout for `spec`, in painting order (later pans cover earlier ones).
std::vector<Pan> layout_pans(const SceneSpec& spec);

/// Paints `pans` shifted right by `col_offset` (wrapping) over the water
/// background. Labels follow the geometry exactly; noise is added to the
/// image only, drawn from the stream of `frame`.
LabeledImage render_scene(const SceneSpec& spec, const std::vector<Pan>& pans,
                          double col_offset = 0.0, std::uint64_t frame = 0);

LabeledImage generate_scene(const SceneSpec& spec);

/// Frames of one scene whose pans move by `spec.drift` pixels per frame.
/// Throws TooFewFrames when n_frames < 2.
std::vector<LabeledImage> generate_sequence(const SceneSpec& spec, int n_frames);

}  // namespace iceseg
