#pragma once

// Brute-force reference for the segmentation metrics. Works directly on the
// masks, one pass per class, without building a confusion matrix.

#include <array>

#include "iceseg/labels.hpp"

namespace iceseg::testing {

struct OracleMetrics {
  double pix_acc = 0.0;
  double mean_acc = 0.0;
  double mean_iou = 0.0;
  double fw_iou = 0.0;
  std::array<double, 3> recall{};
  std::array<double, 3> iou{};
};

inline OracleMetrics oracle_metrics(const LabelMask& gt, const LabelMask& pred) {
  OracleMetrics o;
  double correct = 0;
  double scored = 0;
  double sum_recall = 0;
  double sum_iou = 0;
  double weighted = 0;
  int present = 0;
  for (int k = 0; k < 3; ++k) {
    const auto cls = static_cast<ClassId>(k);
    double truth = 0;
    double hit = 0;
    double uni = 0;
    for (int r = 0; r < gt.rows(); ++r) {
      for (int c = 0; c < gt.cols(); ++c) {
        const ClassId g = gt(r, c);
        const ClassId p = pred(r, c);
        if (g == ClassId::Void || p == ClassId::Void) continue;
        if (g == cls) ++truth;
        if (g == cls && p == cls) ++hit;
        if (g == cls || p == cls) ++uni;
      }
    }
    correct += hit;
    scored += truth;
    o.recall[k] = truth > 0 ? hit / truth : 0.0;
    o.iou[k] = uni > 0 ? hit / uni : 0.0;
    weighted += truth * o.iou[k];
    if (truth > 0) {
      ++present;
      sum_recall += o.recall[k];
      sum_iou += o.iou[k];
    }
  }
  o.pix_acc = correct / scored;
  o.mean_acc = sum_recall / present;
  o.mean_iou = sum_iou / present;
  o.fw_iou = weighted / scored;
  return o;
}

}  // namespace iceseg::testing
