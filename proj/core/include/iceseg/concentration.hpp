#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "iceseg/labels.hpp"

namespace iceseg {

enum class IceClassSet { Combined, AnchorOnly, FrazilOnly };

inline constexpr std::array<IceClassSet, 3> kIceClassSets = {
    IceClassSet::Combined, IceClassSet::AnchorOnly, IceClassSet::FrazilOnly};

std::string_view ice_class_set_name(IceClassSet set) noexcept;
bool counts_as_ice(ClassId c, IceClassSet set) noexcept;

/// Column-wise ice fraction of one frame; one entry per column.
struct ConcentrationVector {
  std::vector<double> values;
  IceClassSet class_set = IceClassSet::Combined;
  /// Columns with no scored pixel. Their value is 0.
  std::vector<bool> void_columns;
};

/// values[j] = (#pixels in column j of the class set) / (#non-Void pixels in column j).
ConcentrationVector conc_vector(const LabelMask& mask, IceClassSet set);

/// 100 * mean_j |a[j] - b[j]|, in percentage points.
/// Throws LengthMismatch when lengths or class sets differ.
double frame_mae(const ConcentrationVector& truth, const ConcentrationVector& predicted);

/// Lower median (the smaller middle element for even counts). Throws EmptyInput.
double median_mae(std::span<const double> frame_maes);

/// Per consecutive pair (t, t+1): 100 * mean_j |c_{t+1}[j] - c_t[j]|.
/// Throws TooFewFrames or WidthMismatch.
std::vector<double> pair_differences(std::span<const LabelMask> frames, IceClassSet set);

/// Mean ice concentration difference over consecutive frame pairs.
struct VideoConsistency {
  std::array<double, 3> mean_difference{};                // indexed like kIceClassSets
  std::array<std::vector<double>, 3> pair_difference{};  // one entry per frame pair

  double operator[](IceClassSet set) const noexcept {
    return mean_difference[static_cast<int>(set)];
  }
};

VideoConsistency temporal_consistency(std::span<const LabelMask> frames);

/// Mean of pair_differences(frames, set).
double temporal_consistency(std::span<const LabelMask> frames, IceClassSet set);

}  // namespace iceseg
