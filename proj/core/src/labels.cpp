#include "iceseg/labels.hpp"

#include <charconv>

#include "iceseg/error.hpp"

namespace iceseg {

std::string_view class_name(ClassId c) noexcept {
  switch (c) {
    case ClassId::Water: return "water";
    case ClassId::Anchor: return "anchor";
    case ClassId::Frazil: return "frazil";
    case ClassId::Void: return "void";
  }
  return "void";
}

ClassId parse_class(std::string_view name) {
  if (name == "water") return ClassId::Water;
  if (name == "anchor") return ClassId::Anchor;
  if (name == "frazil") return ClassId::Frazil;
  if (name == "void") return ClassId::Void;
  throw InvalidArgument("unknown class name '" + std::string(name) + "'");
}

std::uint8_t MaskEncoding::value_of(ClassId c) const noexcept {
  switch (c) {
    case ClassId::Water: return water;
    case ClassId::Anchor: return anchor;
    case ClassId::Frazil: return frazil;
    case ClassId::Void: return void_sentinel;
  }
  return void_sentinel;
}

MaskEncoding MaskEncoding::parse(std::string_view text) {
  MaskEncoding enc;
  if (text.empty() || text == "default") return enc;

  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);

    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw InvalidArgument("bad encoding entry '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq);
    const std::string_view val = item.substr(eq + 1);
    int v = -1;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc{} || ptr != val.data() + val.size() || v < 0 || v > 255)
      throw InvalidArgument("bad encoding value '" + std::string(item) + "'");

    switch (parse_class(key)) {
      case ClassId::Water: enc.water = static_cast<std::uint8_t>(v); break;
      case ClassId::Anchor: enc.anchor = static_cast<std::uint8_t>(v); break;
      case ClassId::Frazil: enc.frazil = static_cast<std::uint8_t>(v); break;
      case ClassId::Void: enc.void_sentinel = static_cast<std::uint8_t>(v); break;
    }
  }

  const std::array<int, 4> vals = {enc.water, enc.anchor, enc.frazil, enc.void_sentinel};
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = i + 1; j < vals.size(); ++j)
      if (vals[i] == vals[j]) throw InvalidArgument("mask encoding values must be distinct");
  return enc;
}

LabelMask decode_mask(const GrayImage& image, const MaskEncoding& encoding, DecodeMode mode) {
  if (image.empty()) throw EmptyInput("cannot decode an empty mask image");

  std::array<ClassId, 256> lut;
  std::array<bool, 256> known{};
  lut.fill(ClassId::Void);
  for (ClassId c : {ClassId::Void, ClassId::Water, ClassId::Anchor, ClassId::Frazil}) {
    lut[encoding.value_of(c)] = c;
    known[encoding.value_of(c)] = true;
  }

  LabelMask mask(image.rows(), image.cols());
  for (int r = 0; r < image.rows(); ++r) {
    for (int c = 0; c < image.cols(); ++c) {
      const std::uint8_t v = image(r, c);
      if (!known[v] && mode == DecodeMode::Strict) throw UnknownPixelValue(v, r, c);
      mask(r, c) = lut[v];
    }
  }
  return mask;
}

GrayImage encode_mask(const LabelMask& mask, const MaskEncoding& encoding) {
  GrayImage out(mask.rows(), mask.cols());
  auto src = mask.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = encoding.value_of(src[i]);
  return out;
}

std::uint64_t ConfusionMatrix::truth_total(int i) const noexcept {
  std::uint64_t s = 0;
  for (int j = 0; j < kNumClasses; ++j) s += n_[i][j];
  return s;
}

std::uint64_t ConfusionMatrix::predicted_total(int j) const noexcept {
  std::uint64_t s = 0;
  for (int i = 0; i < kNumClasses; ++i) s += n_[i][j];
  return s;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t s = 0;
  for (int i = 0; i < kNumClasses; ++i) s += truth_total(i);
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) noexcept {
  for (int i = 0; i < kNumClasses; ++i)
    for (int j = 0; j < kNumClasses; ++j) n_[i][j] += other.n_[i][j];
  return *this;
}

ConfusionMatrix confusion(const LabelMask& truth, const LabelMask& predicted) {
  if (!truth.same_shape(predicted))
    throw DimensionMismatch("confusion: ground truth is " + std::to_string(truth.rows()) + "x" +
                            std::to_string(truth.cols()) + ", prediction is " +
                            std::to_string(predicted.rows()) + "x" +
                            std::to_string(predicted.cols()));
  ConfusionMatrix cm;
  auto t = truth.values();
  auto p = predicted.values();
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (is_scored(t[k]) && is_scored(p[k])) cm.add(t[k], p[k]);
  }
  return cm;
}

ConfusionMatrix collapse_ice(const ConfusionMatrix& cm) noexcept {
  auto merge = [](int k) { return k == 2 ? 1 : k; };
  ConfusionMatrix::Counts out{};
  for (int i = 0; i < kNumClasses; ++i)
    for (int j = 0; j < kNumClasses; ++j) out[merge(i)][merge(j)] += cm(i, j);
  return ConfusionMatrix(out);
}

ClassCounts class_counts(const LabelMask& mask) noexcept {
  ClassCounts counts{};
  for (ClassId c : mask.values())
    if (is_scored(c)) ++counts[index_of(c)];
  return counts;
}

ClassFrequencies class_frequencies(std::span<const LabelMask> masks) {
  ClassCounts total{};
  for (const auto& m : masks) {
    const auto c = class_counts(m);
    for (int k = 0; k < kNumClasses; ++k) total[k] += c[k];
  }
  const std::uint64_t n = total[0] + total[1] + total[2];
  if (n == 0) throw EmptyInput("class_frequencies: no scored pixels");
  ClassFrequencies freq{};
  for (int k = 0; k < kNumClasses; ++k)
    freq[k] = static_cast<double>(total[k]) / static_cast<double>(n);
  return freq;
}

}  // namespace iceseg
