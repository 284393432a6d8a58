// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradient_check.hpp"
#include "iceseg/ablation.hpp"
#include "iceseg/augment.hpp"
#include "iceseg/classifier.hpp"
#include "iceseg/concentration.hpp"
#include "iceseg/csv.hpp"
#include "iceseg/metrics.hpp"
#include "iceseg/synth.hpp"
#include "iceseg/tiling.hpp"
#include "metric_oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace iceseg;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int decimals = 4) { return format_fixed(v, decimals); }

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ICESEG_CLI_PATH) + " " + args + " 2>>\"" + log.string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 1 -------------------------------------------------------------------------
Outcome metric_oracle() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const LabelMask gt = testing::random_mask(32, 32, rng);
    const LabelMask pred = testing::random_mask(32, 32, rng);
    const SegMetrics m = compute_metrics(confusion(gt, pred));
    const auto o = testing::oracle_metrics(gt, pred);
    auto track = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
    track(m.pix_acc, o.pix_acc);
    track(m.mean_acc, o.mean_acc);
    track(m.mean_iou, o.mean_iou);
    track(m.fw_iou, o.fw_iou);
    for (int k = 0; k < 3; ++k) {
      track(m.recall[k], o.recall[k]);
      track(m.precision_iou[k], o.iou[k]);
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream ss;
  ss << "max deviation " << worst << " over 100 mask pairs, " << fmt(secs, 3) << " s";
  return {worst <= 1e-12 && secs < 5.0, ss.str()};
}

// 2 -------------------------------------------------------------------------
struct ReferenceRow {
  std::string label;
  double baseline;
  double model;
  double reference;
  Direction direction;
  bool exact;
};

Outcome reference_arithmetic() {
  constexpr auto inc = Direction::IncreaseBetter;
  constexpr auto dec = Direction::DecreaseBetter;
  // Recall and precision: anchor, frazil, ice+water, ice+water (fw); then median MAE.
  const std::vector<ReferenceRow> rows = {
      {"recall anchor deeplab", 61.54, 74.46, 21.00, inc, false},
      {"recall anchor unet", 61.54, 73.75, 19.85, inc, false},
      {"recall anchor densenet", 61.54, 76.96, 25.06, inc, true},
      {"recall anchor segnet", 61.54, 82.31, 33.75, inc, true},
      {"recall frazil deeplab", 75.41, 87.51, 16.05, inc, true},
      {"recall frazil unet", 75.41, 84.27, 11.75, inc, false},
      {"recall frazil densenet", 75.41, 71.06, -5.77, inc, false},
      {"recall frazil segnet", 75.41, 68.99, -8.51, inc, false},
      {"recall all deeplab", 78.12, 86.38, 10.57, inc, false},
      {"recall all unet", 78.12, 85.13, 8.97, inc, false},
      {"recall all densenet", 78.12, 81.42, 4.22, inc, false},
      {"recall all segnet", 78.12, 83.06, 6.32, inc, false},
      {"recall fw deeplab", 84.93, 90.87, 7.00, inc, false},
      {"recall fw unet", 84.93, 88.69, 4.42, inc, false},
      {"recall fw densenet", 84.93, 85.02, 0.11, inc, false},
      {"recall fw segnet", 84.93, 85.90, 1.14, inc, false},
      {"precision anchor deeplab", 43.32, 62.39, 44.03, inc, false},
      {"precision anchor unet", 43.32, 54.89, 26.72, inc, false},
      {"precision anchor densenet", 43.32, 48.98, 13.07, inc, true},
      {"precision anchor segnet", 43.32, 52.80, 21.90, inc, false},
      {"precision frazil deeplab", 63.07, 77.14, 22.32, inc, false},
      {"precision frazil unet", 63.07, 71.17, 12.84, inc, false},
      {"precision frazil densenet", 63.07, 60.97, -3.32, inc, false},
      {"precision frazil segnet", 63.07, 62.60, -0.73, inc, false},
      {"precision all deeplab", 65.84, 77.25, 17.33, inc, false},
      {"precision all unet", 65.84, 73.19, 11.17, inc, false},
      {"precision all densenet", 65.84, 67.69, 2.82, inc, false},
      {"precision all segnet", 65.84, 69.60, 5.72, inc, false},
      {"precision fw deeplab", 76.84, 84.32, 9.72, inc, false},
      {"precision fw unet", 76.84, 81.73, 6.36, inc, false},
      {"precision fw densenet", 76.84, 77.49, 0.84, inc, false},
      {"precision fw segnet", 76.84, 78.46, 2.10, inc, false},
      {"mae anchor deeplab", 8.37, 4.71, 43.80, dec, false},
      {"mae anchor unet", 8.37, 6.51, 22.29, dec, false},
      {"mae anchor densenet", 8.37, 7.24, 13.59, dec, false},
      {"mae anchor segnet", 8.37, 6.48, 22.61, dec, false},
      {"mae frazil deeplab", 7.18, 4.52, 37.01, dec, false},
      {"mae frazil unet", 7.18, 6.80, 5.22, dec, false},
      {"mae frazil densenet", 7.18, 7.20, -0.30, dec, false},
      {"mae frazil segnet", 7.18, 6.64, 7.51, dec, false},
  };
  int exact_ok = 0, exact_total = 0, close_ok = 0;
  double worst = 0.0;
  std::string bad;
  for (const auto& r : rows) {
    const std::vector<NamedValue> b = {{r.label, r.baseline}}, m = {{r.label, r.model}};
    const double rel = compare(b, m, r.direction).entries.at(0).relative;
    const double dev = std::abs(rel - r.reference);
    worst = std::max(worst, dev);
    if (dev <= 0.1) ++close_ok; else bad += " " + r.label;
    if (r.exact) {
      ++exact_total;
      if (format_fixed(rel) == format_fixed(r.reference)) ++exact_ok; else bad += " " + r.label + "(exact)";
    }
  }
  return {exact_ok == exact_total && close_ok == static_cast<int>(rows.size()),
          std::to_string(exact_ok) + "/" + std::to_string(exact_total) + " exact at 2 decimals, " +
              std::to_string(close_ok) + "/" + std::to_string(rows.size()) + " within 0.1 (max " +
              fmt(worst, 3) + ")" + bad};
}

// 3 -------------------------------------------------------------------------
std::map<std::string, std::string> read_column(const fs::path& csv, const std::string& col) {
  const CsvTable t = read_csv(csv);
  std::map<std::string, std::string> out;
  for (const auto& r : t.rows) out[r[0]] = r[t.column(col)];
  return out;
}

Outcome perfect_prediction(const fs::path& work) {
  const fs::path dir = work / "perfect";
  const fs::path log = work / "perfect.log";
  int rc = run_cli("--seed 11 synth --out \"" + (dir / "static").string() +
                       "\" --frames 4 --drift 0 --rows 160 --cols 200",
                   log);
  rc |= run_cli("eval --gt \"" + (dir / "static/masks").string() + "\" --pred \"" +
                    (dir / "static/masks").string() + "\" --out \"" + (dir / "eval").string() + "\"",
                log);
  rc |= run_cli("conc --gt \"" + (dir / "static/masks").string() + "\" --pred \"" +
                    (dir / "static/masks").string() + "\" --out \"" + (dir / "conc").string() + "\"",
                log);
  rc |= run_cli("vidconsist --masks \"" + (dir / "static/masks").string() + "\" --out \"" +
                    (dir / "vid").string() + "\"",
                log);
  if (rc != 0) return {false, "CLI returned non-zero, see " + log.string()};

  bool ok = true;
  int metrics = 0;
  for (const auto& [name, v] : read_column(dir / "eval/aggregate.csv", "value_pct")) {
    ok &= v == "100.00";
    ++metrics;
  }
  for (const auto& [name, v] : read_column(dir / "conc/summary.csv", "value_pct")) ok &= v == "0.00";
  for (const auto& [name, v] : read_column(dir / "vid/summary.csv", "value_pct")) ok &= v == "0.00";
  return {ok && metrics == 10, std::to_string(metrics) + " metrics at 100.00, median MAE and consistency 0.00"};
}

// 4 -------------------------------------------------------------------------
Outcome tiling_roundtrip() {
  Rng rng(4);
  int cases = 0;
  for (int k : kSupportedPatchSizes) {
    for (auto [rows, cols] : {std::pair{k, k}, std::pair{1080, 1280}, std::pair{333, 517}}) {
      const LabelMask gt = testing::random_mask(rows, cols, rng, 0.01);
      const auto tiled = tile(gt, k);
      if (!(stitch(tiled.tiles, tiled.layout) == gt))
        return {false, "mismatch for K=" + std::to_string(k) + " frame " + std::to_string(rows) + "x" +
                           std::to_string(cols)};
      ++cases;
    }
  }
  return {true, std::to_string(cases) + " size combinations bit-exact"};
}

// 5 -------------------------------------------------------------------------
Outcome augmentation_contracts() {
  Rng rng(5);
  const RgbImage image = testing::random_image(300, 420, rng);
  LabelMask labels = testing::random_mask(300, 420, rng);
  for (int r = 0; r < 40; ++r)
    for (int c = 380; c < 420; ++c) labels(r, c) = ClassId::Void;  // unlabeled corner
  AugmentParams params;
  params.patch_size = 128;
  params.seed = 99;

  const PatchSet a = augment_image("frame", image, labels, params);
  const PatchSet b = augment_image("frame", image, labels, params);
  bool identical = a.size() == b.size();
  for (std::size_t i = 0; identical && i < a.size(); ++i)
    identical = a[i].provenance() == b[i].provenance() && a[i].image() == b[i].image() &&
                a[i].labels() == b[i].labels();

  bool shape_ok = true;
  for (const Patch& p : a) {
    const LabelMask m = p.labels();
    shape_ok &= p.size() == 128 && m.rows() == 128 && m.cols() == 128;
    for (ClassId c : m.values()) shape_ok &= c != ClassId::Void;
  }

  // Patches come in (as-is, horizontal, vertical) triples.
  bool involution = true;
  int checked = 0;
  const std::size_t triples = a.size() / 3;
  for (std::size_t t = 0; t < 50 && t < triples; ++t, ++checked) {
    const std::size_t i = 3 * (t * triples / 50);
    const RgbImage base = a[i].image();
    involution &= flip_horizontal(flip_horizontal(base)) == base;
    involution &= flip_vertical(flip_vertical(base)) == base;
    involution &= flip_horizontal(a[i + 1].image()) == base && flip_vertical(a[i + 2].image()) == base;
    involution &= flip_horizontal(a[i + 1].labels()) == a[i].labels();
  }

  const AugmentParams defaults;
  const std::vector<std::pair<double, double>> expected = {{15, 97.5}, {97.5, 180}, {180, 262.5}, {262.5, 345}};
  bool bands = defaults.rotation_bands == 4;
  for (int i = 0; i < 4; ++i) bands &= defaults.band(i) == expected[i];

  return {identical && shape_ok && involution && checked == 50 && bands,
          std::to_string(a.size()) + " patches; reproducible " + std::to_string(identical) + ", KxK/Void-free " +
              std::to_string(shape_ok) + ", involution on " + std::to_string(checked) + " patches " +
              std::to_string(involution) + ", bands " + std::to_string(bands)};
}

// 6 -------------------------------------------------------------------------
Outcome sampling_contracts() {
  Rng rng(6);
  int units = 0, discarded = 0;
  bool exact = true;
  for (int trial = 0; trial < 200; ++trial) {
    LabelMask m(40, 40);
    const double p_anchor = rng.uniform01() * 0.05;
    for (ClassId& c : m.values()) {
      const double u = rng.uniform01();
      c = u < p_anchor ? ClassId::Anchor : u < 0.6 ? ClassId::Water : ClassId::Frazil;
    }
    const std::size_t n = 1 + rng.uniform_index(40);
    const ClassCounts counts = class_counts(m);
    const bool should_discard = counts[0] < n || counts[1] < n || counts[2] < n;
    Rng draw(static_cast<std::uint64_t>(trial));
    const auto sel = sample_class_balanced_pixels(m, n, SelectionPolicy::Discard, draw);
    ++units;
    if (!sel) {
      ++discarded;
      exact &= should_discard;
      continue;
    }
    exact &= !should_discard;
    std::array<std::size_t, 3> seen{};
    std::set<std::pair<int, int>> unique;
    for (const auto& e : sel->entries) {
      ++seen[index_of(e.cls)];
      exact &= m(e.row, e.col) == e.cls;
      unique.insert({e.row, e.col});
    }
    exact &= seen == std::array<std::size_t, 3>{n, n, n} && unique.size() == 3 * n;
  }

  const RgbImage image = testing::random_image(64, 64, rng);
  const LabelMask labels = testing::random_mask(64, 64, rng);
  const FeatureGrid features = extract_features(image);
  const ModelParams params = testing::random_params(rng, 1.0);
  bool masked = true;
  for (std::size_t n : {2u, 10u, 100u, 1000u}) {
    Rng draw(n);
    const auto sel = sample_class_balanced_pixels(labels, n, SelectionPolicy::TakeAll, draw);
    const LossAndGrad before = loss_and_grad(params, features, labels, *sel, 1e-4);
    Grid<std::uint8_t> chosen(64, 64, std::uint8_t{0});
    for (const auto& e : sel->entries) chosen(e.row, e.col) = 1;
    LabelMask perturbed = labels;
    for (int r = 0; r < 64; ++r)
      for (int c = 0; c < 64; ++c)
        if (!chosen(r, c)) perturbed(r, c) = static_cast<ClassId>((index_of(labels(r, c)) + 1) % 3);
    const LossAndGrad after = loss_and_grad(params, features, perturbed, *sel, 1e-4);
    masked &= before.loss == after.loss && before.grad == after.grad;
  }
  return {exact && masked && discarded > 0 && discarded < units,
          std::to_string(units) + " units (" + std::to_string(discarded) + " discarded), exact " +
              std::to_string(exact) + "; loss bit-identical for N=2,10,100,1000: " + std::to_string(masked)};
}

// 7 -------------------------------------------------------------------------
Outcome gradient_check() {
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto samples = testing::random_samples(rng, 1 + rng.uniform_index(200));
    const ModelParams p = testing::random_params(rng, 2.0);
    worst = std::max(worst, testing::check_gradient(p, samples, trial % 2 ? 1e-2 : 0.0).max_rel_error);
  }
  const auto samples = testing::random_samples(rng, 100);
  const double zero_loss = loss_and_grad(ModelParams{}, samples, 1e-4).loss;
  const double dev = std::abs(zero_loss - std::log(3.0));
  std::ostringstream ss;
  ss << "max relative error " << worst << ", |loss(0) - ln 3| = " << dev;
  return {worst <= 1e-5 && dev <= 1e-9, ss.str()};
}

// 8 -------------------------------------------------------------------------
std::vector<LabeledFrame> scenes(int count, std::uint64_t seed, const std::string& prefix) {
  std::vector<LabeledFrame> out;
  for (int i = 0; i < count; ++i) {
    SceneSpec spec;
    spec.noise_std = 8.0;
    spec.seed = Rng::stream(seed, {static_cast<std::uint64_t>(i)}).next_u64();
    LabeledImage s = generate_scene(spec);
    out.push_back({prefix + std::to_string(i), std::move(s.image), std::move(s.labels)});
  }
  return out;
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  const auto train_set = scenes(20, 801, "train");
  const auto test_set = scenes(5, 802, "test");

  AugmentParams augment;
  augment.patch_size = 256;
  augment.seed = 8;
  TrainConfig config;
  config.epochs = 20;
  config.n_per_class = 100;
  config.batch_size = 512;
  config.learning_rate = 0.5;
  config.seed = 8;

  const PatchSet patches = build_training_set(train_set, augment);
  const TrainResult trained = train(patches, config);
  ConfusionMatrix cm;
  for (const auto& f : test_set) cm += confusion(f.labels, predict_tiled(trained.params, f.image, 256));
  const SegMetrics m = compute_metrics(cm);
  const double secs = seconds_since(t0);
  return {m.pix_acc >= 0.90 && m.mean_iou >= 0.70 && secs < 120.0,
          std::to_string(patches.size()) + " patches (" + std::to_string(trained.units_discarded) +
              " discarded); pix_acc " + fmt(m.pix_acc) + ", mean_iou " + fmt(m.mean_iou) + ", " +
              fmt(secs, 1) + " s"};
}

// 9 -------------------------------------------------------------------------
Outcome temporal_ordering() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {91u, 92u, 93u}) {
    SceneSpec spec;
    spec.rows = 256;
    spec.cols = 256;
    spec.seed = seed;
    auto gt = [&](double drift) {
      spec.drift = drift;
      std::vector<LabelMask> masks;
      for (auto& f : generate_sequence(spec, 6)) masks.push_back(std::move(f.labels));
      return temporal_consistency(masks, IceClassSet::Combined);
    };
    const double still = gt(0), slow = gt(1), fast = gt(20);
    ok &= still == 0.0 && slow < fast;
    detail += " [" + fmt(still, 2) + " " + fmt(slow, 2) + " " + fmt(fast, 2) + "]";
  }
  return {ok, "static/1px/20px:" + detail};
}

// 10 ------------------------------------------------------------------------
Outcome ablation_harness(const fs::path& work) {
  const fs::path dir = work / "ablation";
  const fs::path log = work / "ablation.log";
  const std::string synth = " synth --rows 128 --cols 128 --noise 8 --radius-min 6 --radius-max 24 --frazil 4 --anchor 4";
  int rc = run_cli("--seed 101" + synth + " --count 32 --out \"" + (dir / "pool").string() + "\"", log);
  rc |= run_cli("--seed 102" + synth + " --count 3 --out \"" + (dir / "test").string() + "\"", log);
  {
    std::ofstream cfg(dir / "train.cfg");
    cfg << "# desk-scale settings\nepochs = 4\nn_per_class = 50\nlearning_rate = 0.5\nbatch_size = 256\n"
           "policy = take_all\n";
  }
  const std::string data = " --images \"" + (dir / "pool/images").string() + "\" --masks \"" +
                           (dir / "pool/masks").string() + "\" --test-images \"" + (dir / "test/images").string() +
                           "\" --test-masks \"" + (dir / "test/masks").string() + "\" --config \"" +
                           (dir / "train.cfg").string() + "\" --patch-size 64";
  rc |= run_cli("--seed 7 ablate pixels" + data + " --counts 2,10,100,1000 --out \"" +
                    (dir / "pixels.csv").string() + "\"",
                log);
  rc |= run_cli("--seed 7 ablate images" + data + " --counts 4,8,16,24,32 --out \"" +
                    (dir / "images.csv").string() + "\"",
                log);
  // The same seed through the ordinary pipeline on the full pool.
  rc |= run_cli("--seed 7 augment --images \"" + (dir / "pool/images").string() + "\" --masks \"" +
                    (dir / "pool/masks").string() + "\" --patch-size 64 --out \"" + (dir / "aug").string() + "\"",
                log);
  rc |= run_cli("--seed 7 train --manifest \"" + (dir / "aug/manifest.csv").string() + "\" --config \"" +
                    (dir / "train.cfg").string() + "\" --out \"" + (dir / "model.istb").string() + "\"",
                log);
  rc |= run_cli("predict --params \"" + (dir / "model.istb").string() + "\" --images \"" +
                    (dir / "test/images").string() + "\" --tile 64 --out \"" + (dir / "pred").string() + "\"",
                log);
  rc |= run_cli("eval --gt \"" + (dir / "test/masks").string() + "\" --pred \"" + (dir / "pred").string() +
                    "\" --out \"" + (dir / "eval").string() + "\"",
                log);
  if (rc != 0) return {false, "CLI returned non-zero, see " + log.string()};

  const CsvTable pixels = read_csv(dir / "pixels.csv");
  const CsvTable images = read_csv(dir / "images.csv");
  const CsvTable aggregate = read_csv(dir / "eval/aggregate.csv");
  bool rows_ok = pixels.rows.size() == 4 && images.rows.size() == 5;
  const std::vector<std::string> px = {"2", "10", "100", "1000"}, im = {"4", "8", "16", "24", "32"};
  for (std::size_t i = 0; rows_ok && i < px.size(); ++i) rows_ok &= pixels.rows[i][0] == px[i];
  for (std::size_t i = 0; rows_ok && i < im.size(); ++i) rows_ok &= images.rows[i][0] == im[i];

  bool equal = rows_ok;
  int compared = 0;
  if (rows_ok) {
    const auto& full = images.rows.back();
    for (const auto& r : aggregate.rows) {
      equal &= full[images.column(r[0])] == r[aggregate.column("value_frac")];
      ++compared;
    }
  }
  return {rows_ok && equal && compared == 10,
          "pixel rows " + std::to_string(pixels.rows.size()) + ", image rows " + std::to_string(images.rows.size()) +
              "; full pool equals plain run on " + std::to_string(compared) + " metrics: " + std::to_string(equal)};
}

}  // namespace

int main() {
  testing::TempDir work("acceptance");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric oracle equivalence", metric_oracle},
      {"reference relative-change arithmetic", reference_arithmetic},
      {"perfect-prediction sweep (CLI)", [&] { return perfect_prediction(work.path()); }},
      {"tiling roundtrip", tiling_roundtrip},
      {"augmentation contracts", augmentation_contracts},
      {"sampling contracts", sampling_contracts},
      {"gradient check", gradient_check},
      {"end-to-end desk-scale pipeline", end_to_end},
      {"temporal-consistency ordering", temporal_ordering},
      {"ablation harness (CLI)", [&] { return ablation_harness(work.path()); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
