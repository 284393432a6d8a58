#include "iceseg/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iceseg/error.hpp"

namespace iceseg {

std::string_view ice_class_set_name(IceClassSet set) noexcept {
  switch (set) {
    case IceClassSet::Combined: return "combined";
    case IceClassSet::AnchorOnly: return "anchor";
    case IceClassSet::FrazilOnly: return "frazil";
  }
  return "combined";
}

bool counts_as_ice(ClassId c, IceClassSet set) noexcept {
  switch (set) {
    case IceClassSet::Combined: return is_ice(c);
    case IceClassSet::AnchorOnly: return c == ClassId::Anchor;
    case IceClassSet::FrazilOnly: return c == ClassId::Frazil;
  }
  return false;
}

ConcentrationVector conc_vector(const LabelMask& mask, IceClassSet set) {
  if (mask.empty()) throw EmptyInput("concentration of an empty mask");
  const int cols = mask.cols();
  std::vector<std::uint32_t> ice(cols, 0);
  std::vector<std::uint32_t> scored(cols, 0);
  for (int r = 0; r < mask.rows(); ++r) {
    auto row = mask.row(r);
    for (int c = 0; c < cols; ++c) {
      if (!is_scored(row[c])) continue;
      ++scored[c];
      if (counts_as_ice(row[c], set)) ++ice[c];
    }
  }

  ConcentrationVector out;
  out.class_set = set;
  out.values.resize(cols, 0.0);
  out.void_columns.resize(cols, false);
  for (int c = 0; c < cols; ++c) {
    if (scored[c] == 0) {
      out.void_columns[c] = true;
      continue;
    }
    out.values[c] = static_cast<double>(ice[c]) / scored[c];
  }
  return out;
}

namespace {

double mean_abs_diff_pct(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += std::abs(a[j] - b[j]);
  return 100.0 * sum / static_cast<double>(a.size());
}

}  // namespace

double frame_mae(const ConcentrationVector& truth, const ConcentrationVector& predicted) {
  if (truth.values.size() != predicted.values.size())
    throw LengthMismatch("concentration vectors have lengths " +
                         std::to_string(truth.values.size()) + " and " +
                         std::to_string(predicted.values.size()));
  if (truth.class_set != predicted.class_set)
    throw LengthMismatch("concentration vectors use different class sets");
  if (truth.values.empty()) throw EmptyInput("empty concentration vectors");
  return mean_abs_diff_pct(truth.values, predicted.values);
}

double median_mae(std::span<const double> frame_maes) {
  if (frame_maes.empty()) throw EmptyInput("median of an empty sequence");
  std::vector<double> v(frame_maes.begin(), frame_maes.end());
  const std::size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

std::vector<double> pair_differences(std::span<const LabelMask> frames, IceClassSet set) {
  if (frames.size() < 2) throw TooFewFrames("need at least two frames");
  const int width = frames.front().cols();
  for (std::size_t t = 1; t < frames.size(); ++t)
    if (frames[t].cols() != width)
      throw WidthMismatch("frame " + std::to_string(t) + " has width " +
                          std::to_string(frames[t].cols()) + ", expected " +
                          std::to_string(width));

  std::vector<double> out;
  out.reserve(frames.size() - 1);
  ConcentrationVector prev = conc_vector(frames[0], set);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    ConcentrationVector cur = conc_vector(frames[t], set);
    out.push_back(mean_abs_diff_pct(cur.values, prev.values));
    prev = std::move(cur);
  }
  return out;
}

double temporal_consistency(std::span<const LabelMask> frames, IceClassSet set) {
  const auto d = pair_differences(frames, set);
  return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

VideoConsistency temporal_consistency(std::span<const LabelMask> frames) {
  VideoConsistency out;
  for (std::size_t k = 0; k < kIceClassSets.size(); ++k) {
    out.pair_difference[k] = pair_differences(frames, kIceClassSets[k]);
    const auto& d = out.pair_difference[k];
    out.mean_difference[k] = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  }
  return out;
}

}  // namespace iceseg
