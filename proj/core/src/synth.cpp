#include "iceseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "iceseg/error.hpp"
#include "iceseg/rng.hpp"

namespace iceseg {

void SceneSpec::validate() const {
  if (rows < 1 || cols < 1) throw InvalidArgument("scene must be at least 1x1");
  if (n_frazil_pans < 0 || n_anchor_pans < 0) throw InvalidArgument("pan counts must be >= 0");
  if (radius_min < 2.0 || radius_max < radius_min)
    throw InvalidArgument("pan radii must satisfy 2 <= min <= max");
  for (const IntensityBand& b : {water, anchor, frazil})
    if (b.lo < 0 || b.hi > 255 || b.lo > b.hi) throw InvalidArgument("bad intensity band");
  if (!(water.hi < anchor.lo && anchor.hi < frazil.lo))
    throw InvalidArgument("intensity bands must be disjoint and ordered water < anchor < frazil");
  if (noise_std < 0.0) throw InvalidArgument("noise_std must be >= 0");
  if (drift < 0.0) throw InvalidArgument("drift must be >= 0");
}

std::vector<Pan> layout_pans(const SceneSpec& spec) {
  spec.validate();
  Rng rng = Rng::stream(spec.seed, {0x70616e73});  // "pans"
  std::vector<Pan> pans;
  auto add = [&](ClassId cls, IntensityBand band) {
    Pan p;
    p.cls = cls;
    p.center_row = rng.uniform(0.0, spec.rows);
    p.center_col = rng.uniform(0.0, spec.cols);
    p.radius_row = rng.uniform(spec.radius_min, spec.radius_max);
    // Mostly round pans, mildly elongated.
    p.radius_col = std::max(spec.radius_min, p.radius_row * rng.uniform(0.7, 1.3));
    p.angle = rng.uniform(0.0, std::numbers::pi);
    p.intensity = static_cast<std::uint8_t>(rng.uniform_int(band.lo, band.hi));
    pans.push_back(p);
  };
  for (int i = 0; i < spec.n_anchor_pans; ++i) add(ClassId::Anchor, spec.anchor);
  for (int i = 0; i < spec.n_frazil_pans; ++i) add(ClassId::Frazil, spec.frazil);
  rng.shuffle(pans);
  return pans;
}

namespace {

Rgb tint(ClassId cls, int v) {
  auto clamp = [](int x) { return static_cast<std::uint8_t>(std::clamp(x, 0, 255)); };
  switch (cls) {
    case ClassId::Water: return {clamp(v - 4), clamp(v), clamp(v + 8)};
    case ClassId::Anchor: return {clamp(v + 10), clamp(v + 2), clamp(v - 10)};
    default: return {clamp(v), clamp(v), clamp(v)};
  }
}

int wrap(int c, int n) {
  c %= n;
  return c < 0 ? c + n : c;
}

}  // namespace

LabeledImage render_scene(const SceneSpec& spec, const std::vector<Pan>& pans, double col_offset,
                          std::uint64_t frame) {
  spec.validate();
  Rng bg = Rng::stream(spec.seed, {0x7761746572});  // "water"
  const int water_level = static_cast<int>(bg.uniform_int(spec.water.lo, spec.water.hi));

  LabelMask labels(spec.rows, spec.cols, ClassId::Water);
  Grid<std::uint8_t> level(spec.rows, spec.cols, static_cast<std::uint8_t>(water_level));

  for (const Pan& p : pans) {
    const double cc = p.center_col + col_offset;
    const double reach = std::max(p.radius_row, p.radius_col);
    const int r0 = std::max(0, static_cast<int>(std::floor(p.center_row - reach)));
    const int r1 = std::min(spec.rows - 1, static_cast<int>(std::ceil(p.center_row + reach)));
    const int c0 = static_cast<int>(std::floor(cc - reach));
    const int c1 = static_cast<int>(std::ceil(cc + reach));
    const double cs = std::cos(p.angle);
    const double sn = std::sin(p.angle);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double dy = r - p.center_row;
        const double dx = c - cc;
        const double u = (dx * cs + dy * sn) / p.radius_col;
        const double v = (-dx * sn + dy * cs) / p.radius_row;
        if (u * u + v * v > 1.0) continue;
        const int wc = wrap(c, spec.cols);
        labels(r, wc) = p.cls;
        level(r, wc) = p.intensity;
      }
    }
  }

  Rng noise = Rng::stream(spec.seed, {0x6e6f697365, frame});  // "noise"
  RgbImage image(spec.rows, spec.cols);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      Rgb px = tint(labels(r, c), level(r, c));
      if (spec.noise_std > 0.0) {
        auto jitter = [&](std::uint8_t ch) {
          const double v = ch + spec.noise_std * noise.normal();
          return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        };
        px = Rgb{jitter(px.r), jitter(px.g), jitter(px.b)};
      }
      image(r, c) = px;
    }
  }
  return {std::move(image), std::move(labels)};
}

LabeledImage generate_scene(const SceneSpec& spec) {
  return render_scene(spec, layout_pans(spec));
}

std::vector<LabeledImage> generate_sequence(const SceneSpec& spec, int n_frames) {
  if (n_frames < 2) throw TooFewFrames("a sequence needs at least two frames");
  const std::vector<Pan> pans = layout_pans(spec);
  std::vector<LabeledImage> frames;
  frames.reserve(n_frames);
  for (int t = 0; t < n_frames; ++t)
    frames.push_back(render_scene(spec, pans, spec.drift * t, static_cast<std::uint64_t>(t)));
  return frames;
}

}  // namespace iceseg
