#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "iceseg/ablation.hpp"
#include "iceseg/labels.hpp"
#include "iceseg/metrics.hpp"

namespace iceseg::cli {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 0;
  std::string encoding = "default";
  int jobs = 1;

  MaskEncoding mask_encoding() const { return MaskEncoding::parse(encoding); }
};

void log(const std::string& message);

/// PNG files of `dir` in lexicographic filename order; throws EmptyInput when there are none.
std::vector<fs::path> require_pngs(const fs::path& dir);

LabelMask read_mask(const fs::path& path, const MaskEncoding& encoding);
void write_mask(const fs::path& path, const LabelMask& mask, const MaskEncoding& encoding);

/// Images of `image_dir` paired with the same-named masks of `mask_dir`.
std::vector<LabeledFrame> load_labeled_frames(const fs::path& image_dir, const fs::path& mask_dir,
                                              const MaskEncoding& encoding, int jobs);

/// Masks of `pred_dir` matched by filename to every mask of `gt_dir`.
struct MaskPair {
  std::string name;
  LabelMask truth;
  LabelMask predicted;
};
std::vector<MaskPair> load_mask_pairs(const fs::path& gt_dir, const fs::path& pred_dir,
                                      const MaskEncoding& encoding, int jobs);

/// Runs fn(0..n-1) on up to `jobs` threads; the first exception (by index) is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Shortest text that reads back to the same double.
std::string format_full(double value);

std::string stem_of(const fs::path& p);

/// Metric columns of a view: pix_acc, mean_acc, mean_iou, fw_iou, then
/// recall_<class> and precision_iou_<class>. Values are fractions; absent
/// classes (or frames without pixels in the view) have no value.
struct MetricEntry {
  std::string name;
  std::optional<double> fraction;
};
std::vector<std::string> metric_names(MetricView view);
std::vector<MetricEntry> metric_entries(const std::optional<SegMetrics>& m, MetricView view);

/// "<name>_pct", "<name>" column pairs for the given metric names.
std::vector<std::string> pct_frac_header(const std::vector<std::string>& names);
void append_pct_frac(std::vector<std::string>& row, std::optional<double> fraction);

}  // namespace iceseg::cli
