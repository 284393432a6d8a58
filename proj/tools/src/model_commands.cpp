// train, predict and the ablation harnesses.

#include <memory>

#include "commands.hpp"
#include "iceseg/ablation.hpp"
#include "iceseg/classifier.hpp"
#include "iceseg/config.hpp"
#include "iceseg/csv.hpp"
#include "iceseg/error.hpp"
#include "iceseg/image_io.hpp"

namespace iceseg::cli {
namespace {

// The config file's seed wins; otherwise the global --seed is used.
TrainConfig load_train_config(const fs::path& path, const Globals& g) {
  KeyValueConfig kv = path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path);
  if (!kv.contains("seed")) kv.set("seed", std::to_string(g.seed));
  return TrainConfig::from_config(kv);
}

struct TrainOptions {
  fs::path manifest;
  fs::path config;
  fs::path out;
  fs::path loss_log;
};

void run_train(const TrainOptions& o, const Globals& g) {
  const TrainConfig config = load_train_config(o.config, g);
  const MaskEncoding enc = g.mask_encoding();
  const CsvTable table = read_csv(o.manifest);
  const std::size_t c_patch = table.column("patch"), c_mask = table.column("mask"),
                    c_src = table.column("source");
  if (table.rows.empty()) throw EmptyInput("manifest '" + o.manifest.string() + "' lists no patches");
  const fs::path base = o.manifest.parent_path();

  std::vector<std::optional<Patch>> loaded(table.rows.size());
  parallel_for(table.rows.size(), g.jobs, [&](std::size_t i) {
    const auto& r = table.rows[i];
    RgbImage image = read_rgb_png(base / r[c_patch]);
    LabelMask labels = read_mask(base / r[c_mask], enc);
    if (image.rows() != image.cols() || !image.same_shape(labels))
      throw DimensionMismatch("patch '" + r[c_patch] + "' is not a square image/mask pair");
    PatchProvenance pv;
    pv.source = r[c_src];
    loaded[i] = Patch::owned(std::move(image), std::move(labels), std::move(pv));
  });
  PatchSet patches;
  patches.reserve(loaded.size());
  for (auto& p : loaded) patches.push_back(std::move(*p));
  loaded.clear();

  log("training on " + std::to_string(patches.size()) + " patches for " + std::to_string(config.epochs) +
      " epochs");
  const TrainResult result = train(patches, config, [&](int epoch, double loss) {
    if ((epoch + 1) % 10 == 0 || epoch + 1 == config.epochs)
      log("epoch " + std::to_string(epoch + 1) + " loss " + format_full(loss));
  });
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  save_params(o.out, result.params);
  if (!o.loss_log.empty()) {
    if (o.loss_log.has_parent_path()) fs::create_directories(o.loss_log.parent_path());
    CsvWriter w(o.loss_log, {"epoch", "loss"});
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
      w.row({std::to_string(e + 1), format_full(result.epoch_loss[e])});
  }
  log("used " + std::to_string(result.units_used) + " patches, discarded " +
      std::to_string(result.units_discarded) + "; parameters written to " + o.out.string());
}

struct PredictOptions {
  fs::path params;
  fs::path images;
  fs::path out;
  int tile = 0;
};

void run_predict(const PredictOptions& o, const Globals& g) {
  const ModelParams params = load_params(o.params);
  const MaskEncoding enc = g.mask_encoding();
  const auto images = require_pngs(o.images);
  fs::create_directories(o.out);
  parallel_for(images.size(), g.jobs, [&](std::size_t i) {
    const RgbImage image = read_rgb_png(images[i]);
    const LabelMask mask = o.tile > 0 ? predict_tiled(params, image, o.tile) : predict(params, image);
    write_mask(o.out / images[i].filename(), mask, enc);
  });
  log("predicted " + std::to_string(images.size()) + " frames into " + o.out.string());
}

struct AblateCommon {
  fs::path images;
  fs::path masks;
  fs::path test_images;
  fs::path test_masks;
  fs::path config;
  fs::path out;
  std::vector<std::size_t> counts;
};

struct AblateImagesOptions : AblateCommon {
  AugmentParams augment;
  bool no_flips = false;
};

struct AblatePixelsOptions : AblateCommon {
  PixelAblationSettings settings;
};

void write_report(const fs::path& path, const std::vector<AblationRow>& rows,
                  std::span<const LabeledFrame> pool, const std::string& count_name) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::vector<std::string> header = {count_name, "training_units", "discarded_units", "subset"};
  for (auto& h : pct_frac_header(metric_names(MetricView::All))) header.push_back(std::move(h));
  CsvWriter w(path, header);
  for (const AblationRow& r : rows) {
    std::string subset;
    for (std::size_t i : r.subset) subset += (subset.empty() ? "" : ";") + pool[i].name;
    std::vector<std::string> row = {std::to_string(r.count), std::to_string(r.training_units),
                                    std::to_string(r.discarded_units), subset};
    for (const auto& e : metric_entries(r.metrics, MetricView::All)) append_pct_frac(row, e.fraction);
    w.row(row);
    log(count_name + " " + std::to_string(r.count) + ": pix_acc " + format_fixed(100 * r.metrics.pix_acc) +
        "%, mean_iou " + format_fixed(100 * r.metrics.mean_iou) + "%");
  }
}

void run_ablate_images(const AblateImagesOptions& o, const Globals& g) {
  const TrainConfig config = load_train_config(o.config, g);
  AugmentParams augment = o.augment;
  augment.seed = g.seed;
  augment.flips = !o.no_flips;
  augment.validate();
  const MaskEncoding enc = g.mask_encoding();
  const auto pool = load_labeled_frames(o.images, o.masks, enc, g.jobs);
  const auto test = load_labeled_frames(o.test_images, o.test_masks, enc, g.jobs);
  for (std::size_t n : o.counts)
    if (n == 0 || n > pool.size())
      throw InsufficientPool("count " + std::to_string(n) + " exceeds the pool of " +
                             std::to_string(pool.size()) + " images");
  const auto rows = ablate_images(pool, test, o.counts, augment, config, g.seed);
  write_report(o.out, rows, pool, "images");
}

void run_ablate_pixels(const AblatePixelsOptions& o, const Globals& g) {
  const TrainConfig config = load_train_config(o.config, g);
  PixelAblationSettings settings = o.settings;
  settings.seed = g.seed;
  const MaskEncoding enc = g.mask_encoding();
  const auto pool = load_labeled_frames(o.images, o.masks, enc, g.jobs);
  const auto test = load_labeled_frames(o.test_images, o.test_masks, enc, g.jobs);
  const auto rows = ablate_pixels(pool, test, o.counts, settings, config);
  write_report(o.out, rows, pool, "pixels_per_class");
}

void add_ablate_common(CLI::App* sub, AblateCommon& o) {
  sub->add_option("--images", o.images, "Training pool image directory")->required()->check(CLI::ExistingDirectory);
  sub->add_option("--masks", o.masks, "Training pool mask directory")->required()->check(CLI::ExistingDirectory);
  sub->add_option("--test-images", o.test_images, "Test image directory")->required()->check(CLI::ExistingDirectory);
  sub->add_option("--test-masks", o.test_masks, "Test mask directory")->required()->check(CLI::ExistingDirectory);
  sub->add_option("--counts", o.counts, "Comma-separated counts")->required()->delimiter(',')->check(CLI::PositiveNumber);
  sub->add_option("--config", o.config, "Training config (key = value)")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "Report CSV")->required();
}

}  // namespace

void register_model_commands(CLI::App& app, const Globals& g, std::vector<Handler>& out) {
  {
    auto o = std::make_shared<TrainOptions>();
    auto* sub = app.add_subcommand("train", "Train the per-pixel baseline classifier on a patch manifest");
    sub->add_option("--manifest", o->manifest, "Manifest written by 'augment'")->required()->check(CLI::ExistingFile);
    sub->add_option("--config", o->config, "Training config (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "Parameter file to write")->required();
    sub->add_option("--loss-log", o->loss_log, "Optional CSV of per-epoch loss");
    out.emplace_back(sub, [o, &g] { run_train(*o, g); });
  }
  {
    auto o = std::make_shared<PredictOptions>();
    auto* sub = app.add_subcommand("predict", "Predict masks for a directory of images");
    sub->add_option("--params", o->params, "Parameter file")->required()->check(CLI::ExistingFile);
    sub->add_option("--images", o->images, "Image directory")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--out", o->out, "Output mask directory")->required();
    sub->add_option("--tile", o->tile, "Predict stride-K tiles and stitch them (0 = whole frame)")
        ->check(CLI::NonNegativeNumber);
    out.emplace_back(sub, [o, &g] { run_predict(*o, g); });
  }

  auto* ablate = app.add_subcommand("ablate", "Ablation harnesses");
  ablate->require_subcommand(1);
  {
    auto o = std::make_shared<AblateImagesOptions>();
    auto* sub = ablate->add_subcommand("images", "Train on nested subsets of the training images");
    add_ablate_common(sub, *o);
    sub->add_option("--patch-size", o->augment.patch_size, "Patch size K");
    sub->add_option("--stride-min", o->augment.stride_frac_min, "Smallest stride as a fraction of K");
    sub->add_option("--stride-max", o->augment.stride_frac_max, "Largest stride as a fraction of K");
    sub->add_option("--bands", o->augment.rotation_bands, "Number of rotation bands");
    sub->add_option("--angles-per-band", o->augment.angles_per_band, "Rotations drawn per band");
    sub->add_flag("--no-flips", o->no_flips, "Skip the horizontal and vertical flips");
    out.emplace_back(sub, [o, &g] { run_ablate_images(*o, g); });
  }
  {
    auto o = std::make_shared<AblatePixelsOptions>();
    auto* sub = ablate->add_subcommand("pixels", "Train with only N labelled pixels per class per patch");
    add_ablate_common(sub, *o);
    sub->add_option("--patch-size", o->settings.patch_size, "Patch size K");
    sub->add_option("--training-images", o->settings.training_images, "Images drawn from the pool")
        ->check(CLI::PositiveNumber);
    out.emplace_back(sub, [o, &g] { run_ablate_pixels(*o, g); });
  }
}

}  // namespace iceseg::cli
