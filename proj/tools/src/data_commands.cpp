// synth, augment, tile and stitch.

#include <map>
#include <memory>
#include <set>

#include "commands.hpp"
#include "iceseg/augment.hpp"
#include "iceseg/csv.hpp"
#include "iceseg/error.hpp"
#include "iceseg/image_io.hpp"
#include "iceseg/rng.hpp"
#include "iceseg/synth.hpp"
#include "iceseg/tiling.hpp"

namespace iceseg::cli {
namespace {

std::string numbered(const std::string& prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return prefix + "_" + buf;
}

struct SynthOptions {
  fs::path out;
  int count = 1;
  int frames = 0;
  std::string prefix;
  SceneSpec spec;
};

void run_synth(const SynthOptions& o, const Globals& g) {
  const MaskEncoding enc = g.mask_encoding();
  SceneSpec base = o.spec;
  base.seed = g.seed;
  base.validate();
  fs::create_directories(o.out / "images");
  fs::create_directories(o.out / "masks");

  auto save = [&](const std::string& name, const LabeledImage& scene) {
    write_png(o.out / "images" / (name + ".png"), scene.image);
    write_mask(o.out / "masks" / (name + ".png"), scene.labels, enc);
  };

  if (o.frames > 0) {
    const std::string prefix = o.prefix.empty() ? "frame" : o.prefix;
    const auto frames = generate_sequence(base, o.frames);
    parallel_for(frames.size(), g.jobs, [&](std::size_t t) { save(numbered(prefix, t), frames[t]); });
    log("wrote " + std::to_string(frames.size()) + " sequence frames to " + o.out.string());
    return;
  }
  const std::string prefix = o.prefix.empty() ? "scene" : o.prefix;
  parallel_for(static_cast<std::size_t>(o.count), g.jobs, [&](std::size_t i) {
    SceneSpec spec = base;
    spec.seed = Rng::stream(g.seed, {i}).next_u64();
    save(numbered(prefix, i), generate_scene(spec));
  });
  log("wrote " + std::to_string(o.count) + " scenes to " + o.out.string());
}

struct AugmentOptions {
  fs::path images;
  fs::path masks;
  fs::path out;
  AugmentParams params;
  bool no_flips = false;
};

std::string patch_stem(const PatchProvenance& p) {
  const std::string angle = p.angle ? format_fixed(*p.angle) : "0";
  return p.source + "_" + std::to_string(p.row) + "_" + std::to_string(p.col) + "_r" + angle + "_" +
         flip_code(p.flip);
}

void run_augment(const AugmentOptions& o, const Globals& g) {
  const MaskEncoding enc = g.mask_encoding();
  AugmentParams params = o.params;
  params.seed = g.seed;
  params.flips = !o.no_flips;
  params.validate();

  const auto images = require_pngs(o.images);
  fs::create_directories(o.out / "images");
  fs::create_directories(o.out / "masks");

  std::vector<std::vector<std::vector<std::string>>> rows(images.size());
  parallel_for(images.size(), g.jobs, [&](std::size_t i) {
    const fs::path mask_path = o.masks / images[i].filename();
    if (!fs::exists(mask_path))
      throw FormatError("no mask '" + mask_path.string() + "' for image '" + images[i].string() + "'");
    const RgbImage image = read_rgb_png(images[i]);
    const LabelMask labels = read_mask(mask_path, enc);
    const std::string source = stem_of(images[i]);
    const PatchSet patches = augment_image(source, image, labels, params);

    std::set<std::string> used;
    for (const Patch& p : patches) {
      const std::string stem = patch_stem(p.provenance());
      if (!used.insert(stem).second) throw FormatError("duplicate patch name '" + stem + "'");
      const std::string file = stem + ".png";
      write_png(o.out / "images" / file, p.image());
      write_mask(o.out / "masks" / file, p.labels(), enc);
      const auto& pv = p.provenance();
      rows[i].push_back({"images/" + file, "masks/" + file, pv.source, std::to_string(pv.row),
                         std::to_string(pv.col), pv.angle ? format_full(*pv.angle) : "0",
                         std::string(1, flip_code(pv.flip))});
    }
    log(source + ": " + std::to_string(patches.size()) + " patches");
  });

  CsvWriter manifest(o.out / "manifest.csv", {"patch", "mask", "source", "row", "col", "angle", "flip"});
  std::size_t total = 0;
  for (const auto& per_image : rows) {
    for (const auto& r : per_image) manifest.row(r);
    total += per_image.size();
  }
  log("wrote " + std::to_string(total) + " patches to " + o.out.string());
}

struct TileOptions {
  fs::path images;
  fs::path masks;
  fs::path out;
  int size = 640;
};

void run_tile(const TileOptions& o, const Globals& g) {
  const MaskEncoding enc = g.mask_encoding();
  if (o.size < 1) throw InvalidArgument("tile size must be positive");
  const auto images = require_pngs(o.images);
  fs::create_directories(o.out / "tiles");
  if (!o.masks.empty()) fs::create_directories(o.out / "tile_masks");

  std::vector<std::vector<std::vector<std::string>>> rows(images.size());
  parallel_for(images.size(), g.jobs, [&](std::size_t i) {
    const RgbImage image = read_rgb_png(images[i]);
    const auto tiled = tile(image, o.size);
    std::optional<TiledFrame<ClassId>> mask_tiles;
    if (!o.masks.empty()) {
      const LabelMask labels = read_mask(o.masks / images[i].filename(), enc);
      if (!labels.same_shape(image))
        throw DimensionMismatch("image and mask sizes differ for '" + images[i].filename().string() + "'");
      mask_tiles = tile(labels, o.size);
    }
    const std::string source = images[i].filename().string();
    for (std::size_t k = 0; k < tiled.tiles.size(); ++k) {
      const WindowOrigin origin = tiled.layout.origins[k];
      const std::string file =
          stem_of(images[i]) + "_" + std::to_string(origin.row) + "_" + std::to_string(origin.col) + ".png";
      write_png(o.out / "tiles" / file, tiled.tiles[k]);
      if (mask_tiles) write_mask(o.out / "tile_masks" / file, mask_tiles->tiles[k], enc);
      rows[i].push_back({file, source, std::to_string(image.rows()), std::to_string(image.cols()),
                         std::to_string(o.size), std::to_string(origin.row), std::to_string(origin.col)});
    }
  });

  CsvWriter manifest(o.out / "tiles.csv",
                     {"tile", "source", "frame_rows", "frame_cols", "tile_size", "row", "col"});
  for (const auto& per_image : rows)
    for (const auto& r : per_image) manifest.row(r);
  log("tiled " + std::to_string(images.size()) + " frames into " + o.out.string());
}

struct StitchOptions {
  fs::path manifest;
  fs::path masks;
  fs::path out;
};

int to_int(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad " + what + " '" + text + "' in tile manifest");
  }
}

void run_stitch(const StitchOptions& o, const Globals& g) {
  const MaskEncoding enc = g.mask_encoding();
  const CsvTable table = read_csv(o.manifest);
  const std::size_t c_tile = table.column("tile"), c_src = table.column("source"),
                    c_rows = table.column("frame_rows"), c_cols = table.column("frame_cols"),
                    c_size = table.column("tile_size"), c_row = table.column("row"),
                    c_col = table.column("col");

  // Frames in order of first appearance.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const std::vector<std::string>*>> by_source;
  for (const auto& r : table.rows) {
    auto [it, inserted] = by_source.try_emplace(r[c_src]);
    if (inserted) order.push_back(r[c_src]);
    it->second.push_back(&r);
  }
  if (order.empty()) throw EmptyInput("tile manifest '" + o.manifest.string() + "' has no rows");
  fs::create_directories(o.out);

  parallel_for(order.size(), g.jobs, [&](std::size_t i) {
    const auto& entries = by_source.at(order[i]);
    const auto& first = *entries.front();
    const TileLayout layout = make_tile_layout(to_int(first[c_rows], "frame_rows"),
                                               to_int(first[c_cols], "frame_cols"),
                                               to_int(first[c_size], "tile_size"));
    if (entries.size() != layout.origins.size())
      throw LayoutMismatch(order[i] + ": expected " + std::to_string(layout.origins.size()) +
                           " tiles, manifest lists " + std::to_string(entries.size()));
    std::vector<LabelMask> tiles;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = *entries[k];
      const WindowOrigin origin{to_int(e[c_row], "row"), to_int(e[c_col], "col")};
      if (!(origin == layout.origins[k]))
        throw LayoutMismatch(order[i] + ": tile " + e[c_tile] + " is out of layout order");
      tiles.push_back(read_mask(o.masks / e[c_tile], enc));
    }
    write_mask(o.out / fs::path(order[i]).filename(), stitch(tiles, layout), enc);
  });
  log("stitched " + std::to_string(order.size()) + " frames into " + o.out.string());
}

}  // namespace

void register_data_commands(CLI::App& app, const Globals& g, std::vector<Handler>& out) {
  {
    auto o = std::make_shared<SynthOptions>();
    auto* sub = app.add_subcommand("synth", "Generate synthetic river-ice scenes or a drifting sequence");
    sub->add_option("--out", o->out, "Output directory (images/ and masks/ are created)")->required();
    sub->add_option("--count", o->count, "Number of independent scenes")->check(CLI::PositiveNumber);
    auto* frames = sub->add_option("--frames", o->frames, "Write one sequence of this many frames instead")
                       ->check(CLI::Range(2, 1 << 20));
    sub->add_option("--prefix", o->prefix, "File name prefix (scene or frame)");
    sub->add_option("--rows", o->spec.rows, "Frame height")->check(CLI::PositiveNumber);
    sub->add_option("--cols", o->spec.cols, "Frame width")->check(CLI::PositiveNumber);
    sub->add_option("--frazil", o->spec.n_frazil_pans, "Number of frazil pans")->check(CLI::NonNegativeNumber);
    sub->add_option("--anchor", o->spec.n_anchor_pans, "Number of anchor pans")->check(CLI::NonNegativeNumber);
    sub->add_option("--radius-min", o->spec.radius_min, "Smallest pan radius");
    sub->add_option("--radius-max", o->spec.radius_max, "Largest pan radius");
    sub->add_option("--noise", o->spec.noise_std, "Additive noise standard deviation (gray levels)");
    sub->add_option("--drift", o->spec.drift, "Pan drift per frame in pixels (sequences)")->needs(frames);
    out.emplace_back(sub, [o, &g] { run_synth(*o, g); });
  }
  {
    auto o = std::make_shared<AugmentOptions>();
    auto* sub = app.add_subcommand("augment", "Build the augmented patch dataset");
    sub->add_option("--images", o->images, "Image directory")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--masks", o->masks, "Mask directory (same file names)")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--out", o->out, "Output directory")->required();
    sub->add_option("--patch-size", o->params.patch_size, "Patch size K");
    sub->add_option("--stride-min", o->params.stride_frac_min, "Smallest stride as a fraction of K");
    sub->add_option("--stride-max", o->params.stride_frac_max, "Largest stride as a fraction of K");
    sub->add_option("--rotation-min", o->params.rotation_min, "Smallest rotation angle (degrees)");
    sub->add_option("--rotation-max", o->params.rotation_max, "Largest rotation angle (degrees)");
    sub->add_option("--bands", o->params.rotation_bands, "Number of rotation bands");
    sub->add_option("--angles-per-band", o->params.angles_per_band, "Rotations drawn per band");
    sub->add_flag("--no-flips", o->no_flips, "Skip the horizontal and vertical flips");
    out.emplace_back(sub, [o, &g] { run_augment(*o, g); });
  }
  {
    auto o = std::make_shared<TileOptions>();
    auto* sub = app.add_subcommand("tile", "Cut frames into KxK tiles for tiled inference");
    sub->add_option("--images", o->images, "Image directory")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--masks", o->masks, "Optional mask directory, tiled alongside")->check(CLI::ExistingDirectory);
    sub->add_option("--size", o->size, "Tile size K")->check(CLI::PositiveNumber);
    sub->add_option("--out", o->out, "Output directory (tiles/, tile_masks/, tiles.csv)")->required();
    out.emplace_back(sub, [o, &g] { run_tile(*o, g); });
  }
  {
    auto o = std::make_shared<StitchOptions>();
    auto* sub = app.add_subcommand("stitch", "Reassemble per-tile masks into full-frame masks");
    sub->add_option("--manifest", o->manifest, "Tile manifest written by 'tile'")->required()->check(CLI::ExistingFile);
    sub->add_option("--masks", o->masks, "Directory of per-tile masks named like the tiles")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--out", o->out, "Output directory for frame masks")->required();
    out.emplace_back(sub, [o, &g] { run_stitch(*o, g); });
  }
}

}  // namespace iceseg::cli
