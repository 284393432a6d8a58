#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

#include "iceseg/grid.hpp"

namespace iceseg {

enum class ClassId : std::uint8_t { Water = 0, Anchor = 1, Frazil = 2, Void = 3 };

/// Number of scoreable classes. Void is never scored.
inline constexpr int kNumClasses = 3;

inline constexpr std::array<ClassId, kNumClasses> kScoredClasses = {
    ClassId::Water, ClassId::Anchor, ClassId::Frazil};

constexpr int index_of(ClassId c) noexcept { return static_cast<int>(c); }
constexpr bool is_scored(ClassId c) noexcept { return c != ClassId::Void; }
constexpr bool is_ice(ClassId c) noexcept {
  return c == ClassId::Anchor || c == ClassId::Frazil;
}

std::string_view class_name(ClassId c) noexcept;
/// Accepts "water", "anchor", "frazil", "void". Throws InvalidArgument.
ClassId parse_class(std::string_view name);

/// Subset of the scoreable classes, used to restrict metric means.
class ClassSet {
 public:
  constexpr ClassSet() = default;
  constexpr ClassSet(std::initializer_list<ClassId> classes) {
    for (ClassId c : classes) insert(c);
  }

  static constexpr ClassSet all() {
    return {ClassId::Water, ClassId::Anchor, ClassId::Frazil};
  }

  constexpr void insert(ClassId c) {
    if (is_scored(c)) bits_ |= static_cast<std::uint8_t>(1u << index_of(c));
  }
  constexpr bool contains(ClassId c) const {
    return is_scored(c) && (bits_ >> index_of(c)) & 1u;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const {
    return ((bits_ >> 0) & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1);
  }

  friend constexpr bool operator==(ClassSet, ClassSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

using LabelMask = Grid<ClassId>;

/// Gray level assigned to each label in 8-bit mask files.
struct MaskEncoding {
  std::uint8_t water = 0;
  std::uint8_t anchor = 128;
  std::uint8_t frazil = 255;
  std::uint8_t void_sentinel = 64;

  std::uint8_t value_of(ClassId c) const noexcept;

  /// Parses "default" or a comma list such as "water=0,anchor=100,frazil=255,void=64".
  /// Keys not mentioned keep their default value.
  static MaskEncoding parse(std::string_view text);
};

enum class DecodeMode { Strict, Tolerant };

/// Maps gray levels to labels. The void sentinel decodes to Void. Unknown
/// values throw UnknownPixelValue in strict mode and decode to Void otherwise.
LabelMask decode_mask(const GrayImage& image, const MaskEncoding& encoding = {},
                      DecodeMode mode = DecodeMode::Strict);

GrayImage encode_mask(const LabelMask& mask, const MaskEncoding& encoding = {});

/// n(i, j) counts pixels of truth class i predicted as class j.
class ConfusionMatrix {
 public:
  using Counts = std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(const Counts& counts) : n_(counts) {}

  std::uint64_t operator()(int truth, int pred) const noexcept { return n_[truth][pred]; }
  std::uint64_t operator()(ClassId truth, ClassId pred) const noexcept {
    return n_[index_of(truth)][index_of(pred)];
  }
  void add(ClassId truth, ClassId pred, std::uint64_t count = 1) noexcept {
    n_[index_of(truth)][index_of(pred)] += count;
  }

  /// Ground-truth total of class i (row sum).
  std::uint64_t truth_total(int i) const noexcept;
  /// Predicted total of class j (column sum).
  std::uint64_t predicted_total(int j) const noexcept;
  std::uint64_t total() const noexcept;

  const Counts& counts() const noexcept { return n_; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) noexcept;
  friend ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) noexcept {
    return a += b;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  Counts n_{};
};

/// Pixels that are Void in either mask are skipped. Throws DimensionMismatch.
ConfusionMatrix confusion(const LabelMask& truth, const LabelMask& predicted);

/// Merges frazil into anchor so that row/column 1 means "ice" and row/column 2
/// is empty. Used for the two-class water-vs-ice view.
ConfusionMatrix collapse_ice(const ConfusionMatrix& cm) noexcept;

using ClassCounts = std::array<std::uint64_t, kNumClasses>;
using ClassFrequencies = std::array<double, kNumClasses>;

ClassCounts class_counts(const LabelMask& mask) noexcept;

/// Fraction of scored pixels per class over all masks. Throws EmptyInput when
/// no scored pixel exists.
ClassFrequencies class_frequencies(std::span<const LabelMask> masks);

}  // namespace iceseg
