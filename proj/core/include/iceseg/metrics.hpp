#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iceseg/labels.hpp"

namespace iceseg {

/// Standard segmentation scores derived from a confusion matrix. All values
/// are fractions in [0, 1]. Precision is reported as per-class IOU.
struct SegMetrics {
  double pix_acc = 0.0;
  double mean_acc = 0.0;
  double mean_iou = 0.0;
  double fw_iou = 0.0;
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> precision_iou{};
  /// Class has ground-truth pixels (t_i > 0). Absent classes report 0 and are
  /// left out of every mean.
  std::array<bool, kNumClasses> present{};
  ClassSet classes = ClassSet::all();
  /// Index 1 holds anchor and frazil merged (the Ice view).
  bool ice_merged = false;
};

/// Pixel accuracy, mean accuracy, mean IOU and frequency weighted IOU over
/// `subset` (all three classes by default):
///
///   pix_acc  = sum_i n_ii / sum_i t_i
///   mean_acc = 1/n sum_i n_ii / t_i
///   mean_iou = 1/n sum_i n_ii / (t_i + p_i - n_ii)
///   fw_iou   = (sum_k t_k)^-1 sum_i t_i n_ii / (t_i + p_i - n_ii)
///
/// with t_i the truth total and p_i the predicted total of class i, sums over
/// the subset, and n the number of subset classes with t_i > 0.
/// Throws EmptyConfusion when the subset has no ground-truth pixels.
SegMetrics compute_metrics(const ConfusionMatrix& cm, std::optional<ClassSet> subset = {});

/// Class views used by reports.
enum class MetricView {
  All,     // three classes
  Ice,     // water vs ice (anchor and frazil merged)
  Water,   // single-class subsets
  Anchor,
  Frazil,
};

MetricView parse_metric_view(std::string_view name);
std::string_view metric_view_name(MetricView view) noexcept;

/// compute_metrics on the view's confusion matrix and class subset. For the
/// Ice view, index 1 of recall/precision_iou holds the merged ice class.
SegMetrics compute_view(const ConfusionMatrix& cm, MetricView view);

struct NamedValue {
  std::string name;
  double value = 0.0;
};

/// Metrics as named percentages: pix_acc, mean_acc, mean_iou, fw_iou,
/// recall_<class>, precision_iou_<class>. Classes outside the subset or
/// absent from the ground truth are omitted.
std::vector<NamedValue> to_named_percentages(const SegMetrics& m);

enum class Direction { IncreaseBetter, DecreaseBetter };

/// (model - baseline) / baseline * 100 for IncreaseBetter,
/// (baseline - model) / baseline * 100 for DecreaseBetter.
/// Throws ZeroBaseline.
double relative_change(double baseline, double model, Direction direction);

struct ComparisonEntry {
  std::string name;
  double baseline = 0.0;
  double model = 0.0;
  double relative = 0.0;
};

struct ComparisonReport {
  Direction direction = Direction::IncreaseBetter;
  std::vector<ComparisonEntry> entries;
};

/// Compares values with matching names, in baseline order. Names present on
/// one side only are skipped.
ComparisonReport compare(std::span<const NamedValue> baseline, std::span<const NamedValue> model,
                         Direction direction = Direction::IncreaseBetter);

ComparisonReport compare(const SegMetrics& baseline, const SegMetrics& model);

/// Fixed-point text with `decimals` places; never prints "-0.00".
std::string format_fixed(double value, int decimals = 2);

}  // namespace iceseg
