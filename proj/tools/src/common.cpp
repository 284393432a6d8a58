#include "common.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>

#include "iceseg/error.hpp"
#include "iceseg/image_io.hpp"

namespace iceseg::cli {

void log(const std::string& message) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << "ice-seg: " << message << '\n';
}

std::vector<fs::path> require_pngs(const fs::path& dir) {
  auto files = list_png_files(dir);
  if (files.empty()) throw EmptyInput("no .png files in '" + dir.string() + "'");
  return files;
}

LabelMask read_mask(const fs::path& path, const MaskEncoding& encoding) {
  try {
    return decode_mask(read_gray_png(path), encoding, DecodeMode::Strict);
  } catch (const UnknownPixelValue& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_mask(const fs::path& path, const LabelMask& mask, const MaskEncoding& encoding) {
  write_png(path, encode_mask(mask, encoding));
}

std::vector<LabeledFrame> load_labeled_frames(const fs::path& image_dir, const fs::path& mask_dir,
                                              const MaskEncoding& encoding, int jobs) {
  const auto images = require_pngs(image_dir);
  std::vector<LabeledFrame> frames(images.size());
  parallel_for(images.size(), jobs, [&](std::size_t i) {
    const fs::path mask_path = mask_dir / images[i].filename();
    if (!fs::exists(mask_path))
      throw FormatError("no mask '" + mask_path.string() + "' for image '" + images[i].string() + "'");
    LabeledFrame& f = frames[i];
    f.name = stem_of(images[i]);
    f.image = read_rgb_png(images[i]);
    f.labels = read_mask(mask_path, encoding);
    if (!f.image.same_shape(f.labels))
      throw DimensionMismatch("image and mask sizes differ for '" + images[i].filename().string() + "'");
  });
  return frames;
}

std::vector<MaskPair> load_mask_pairs(const fs::path& gt_dir, const fs::path& pred_dir,
                                      const MaskEncoding& encoding, int jobs) {
  const auto truths = require_pngs(gt_dir);
  std::vector<MaskPair> pairs(truths.size());
  parallel_for(truths.size(), jobs, [&](std::size_t i) {
    const fs::path pred_path = pred_dir / truths[i].filename();
    if (!fs::exists(pred_path))
      throw FormatError("no prediction '" + pred_path.string() + "' for '" + truths[i].string() + "'");
    pairs[i].name = truths[i].filename().string();
    pairs[i].truth = read_mask(truths[i], encoding);
    pairs[i].predicted = read_mask(pred_path, encoding);
    if (!pairs[i].truth.same_shape(pairs[i].predicted))
      throw DimensionMismatch("ground truth and prediction sizes differ for '" + pairs[i].name + "'");
  });
  return pairs;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string format_full(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string stem_of(const fs::path& p) { return p.stem().string(); }

namespace {

std::vector<ClassId> view_classes(MetricView view) {
  switch (view) {
    case MetricView::All: return {ClassId::Water, ClassId::Anchor, ClassId::Frazil};
    case MetricView::Ice: return {ClassId::Water, ClassId::Anchor};
    case MetricView::Water: return {ClassId::Water};
    case MetricView::Anchor: return {ClassId::Anchor};
    case MetricView::Frazil: return {ClassId::Frazil};
  }
  return {};
}

std::string view_class_name(MetricView view, ClassId c) {
  if (view == MetricView::Ice && c == ClassId::Anchor) return "ice";
  return std::string(class_name(c));
}

}  // namespace

std::vector<std::string> metric_names(MetricView view) {
  std::vector<std::string> names = {"pix_acc", "mean_acc", "mean_iou", "fw_iou"};
  for (ClassId c : view_classes(view)) names.push_back("recall_" + view_class_name(view, c));
  for (ClassId c : view_classes(view)) names.push_back("precision_iou_" + view_class_name(view, c));
  return names;
}

std::vector<MetricEntry> metric_entries(const std::optional<SegMetrics>& m, MetricView view) {
  const auto names = metric_names(view);
  std::vector<MetricEntry> out;
  for (const auto& n : names) out.push_back({n, std::nullopt});
  if (!m) return out;
  out[0].fraction = m->pix_acc;
  out[1].fraction = m->mean_acc;
  out[2].fraction = m->mean_iou;
  out[3].fraction = m->fw_iou;
  const auto classes = view_classes(view);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const int i = index_of(classes[k]);
    if (!m->present[i]) continue;
    out[4 + k].fraction = m->recall[i];
    out[4 + classes.size() + k].fraction = m->precision_iou[i];
  }
  return out;
}

std::vector<std::string> pct_frac_header(const std::vector<std::string>& names) {
  std::vector<std::string> h;
  for (const auto& n : names) {
    h.push_back(n + "_pct");
    h.push_back(n);
  }
  return h;
}

void append_pct_frac(std::vector<std::string>& row, std::optional<double> fraction) {
  row.push_back(fraction ? format_fixed(100.0 * *fraction) : "");
  row.push_back(fraction ? format_full(*fraction) : "");
}

}  // namespace iceseg::cli
