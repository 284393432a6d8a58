#include "iceseg/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "iceseg/error.hpp"

namespace iceseg {

SegMetrics compute_metrics(const ConfusionMatrix& cm, std::optional<ClassSet> subset) {
  const ClassSet classes = subset.value_or(ClassSet::all());
  if (classes.empty()) throw InvalidArgument("empty class subset");

  SegMetrics m;
  m.classes = classes;

  double diag = 0.0;
  double truth = 0.0;
  double weighted_iou = 0.0;
  double sum_acc = 0.0;
  double sum_iou = 0.0;
  int present = 0;

  for (int i = 0; i < kNumClasses; ++i) {
    const auto t = static_cast<double>(cm.truth_total(i));
    const auto p = static_cast<double>(cm.predicted_total(i));
    const auto nii = static_cast<double>(cm(i, i));
    const double uni = t + p - nii;
    m.present[i] = t > 0;
    m.recall[i] = t > 0 ? nii / t : 0.0;
    m.precision_iou[i] = uni > 0 ? nii / uni : 0.0;

    if (!classes.contains(static_cast<ClassId>(i))) continue;
    diag += nii;
    truth += t;
    weighted_iou += t * m.precision_iou[i];
    if (t > 0) {
      sum_acc += m.recall[i];
      sum_iou += m.precision_iou[i];
      ++present;
    }
  }

  if (truth == 0) throw EmptyConfusion("no ground-truth pixels in the selected classes");
  m.pix_acc = diag / truth;
  m.mean_acc = sum_acc / present;
  m.mean_iou = sum_iou / present;
  m.fw_iou = weighted_iou / truth;
  return m;
}

MetricView parse_metric_view(std::string_view name) {
  if (name == "all") return MetricView::All;
  if (name == "ice") return MetricView::Ice;
  if (name == "water") return MetricView::Water;
  if (name == "anchor") return MetricView::Anchor;
  if (name == "frazil") return MetricView::Frazil;
  throw InvalidArgument("unknown class view '" + std::string(name) + "'");
}

std::string_view metric_view_name(MetricView view) noexcept {
  switch (view) {
    case MetricView::All: return "all";
    case MetricView::Ice: return "ice";
    case MetricView::Water: return "water";
    case MetricView::Anchor: return "anchor";
    case MetricView::Frazil: return "frazil";
  }
  return "all";
}

SegMetrics compute_view(const ConfusionMatrix& cm, MetricView view) {
  switch (view) {
    case MetricView::All: return compute_metrics(cm);
    case MetricView::Ice: {
      SegMetrics m = compute_metrics(collapse_ice(cm), ClassSet{ClassId::Water, ClassId::Anchor});
      m.ice_merged = true;
      return m;
    }
    case MetricView::Water: return compute_metrics(cm, ClassSet{ClassId::Water});
    case MetricView::Anchor: return compute_metrics(cm, ClassSet{ClassId::Anchor});
    case MetricView::Frazil: return compute_metrics(cm, ClassSet{ClassId::Frazil});
  }
  return compute_metrics(cm);
}

std::vector<NamedValue> to_named_percentages(const SegMetrics& m) {
  auto name = [&](ClassId c) {
    return m.ice_merged && c == ClassId::Anchor ? std::string("ice") : std::string(class_name(c));
  };
  std::vector<NamedValue> out = {
      {"pix_acc", 100.0 * m.pix_acc},
      {"mean_acc", 100.0 * m.mean_acc},
      {"mean_iou", 100.0 * m.mean_iou},
      {"fw_iou", 100.0 * m.fw_iou},
  };
  for (ClassId c : kScoredClasses) {
    const int i = index_of(c);
    if (!m.classes.contains(c) || !m.present[i]) continue;
    out.push_back({"recall_" + name(c), 100.0 * m.recall[i]});
  }
  for (ClassId c : kScoredClasses) {
    const int i = index_of(c);
    if (!m.classes.contains(c) || !m.present[i]) continue;
    out.push_back({"precision_iou_" + name(c), 100.0 * m.precision_iou[i]});
  }
  return out;
}

double relative_change(double baseline, double model, Direction direction) {
  if (baseline == 0.0) throw ZeroBaseline("relative change against a zero baseline");
  const double delta = direction == Direction::IncreaseBetter ? model - baseline : baseline - model;
  return delta / baseline * 100.0;
}

ComparisonReport compare(std::span<const NamedValue> baseline, std::span<const NamedValue> model,
                         Direction direction) {
  ComparisonReport report;
  report.direction = direction;
  for (const NamedValue& b : baseline) {
    for (const NamedValue& m : model) {
      if (m.name != b.name) continue;
      report.entries.push_back({b.name, b.value, m.value, relative_change(b.value, m.value, direction)});
      break;
    }
  }
  return report;
}

ComparisonReport compare(const SegMetrics& baseline, const SegMetrics& model) {
  const auto b = to_named_percentages(baseline);
  const auto m = to_named_percentages(model);
  return compare(b, m, Direction::IncreaseBetter);
}

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace iceseg
