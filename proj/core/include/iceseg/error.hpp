#pragma once

#include <stdexcept>
#include <string>

namespace iceseg {

/// Base class for every data error raised by the library. The CLI maps these
/// to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ICESEG_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

ICESEG_DEFINE_ERROR(DimensionMismatch);
ICESEG_DEFINE_ERROR(EmptyInput);
ICESEG_DEFINE_ERROR(PatchTooLarge);
ICESEG_DEFINE_ERROR(DegenerateCrop);
ICESEG_DEFINE_ERROR(LayoutMismatch);
ICESEG_DEFINE_ERROR(EmptyConfusion);
ICESEG_DEFINE_ERROR(ZeroBaseline);
ICESEG_DEFINE_ERROR(LengthMismatch);
ICESEG_DEFINE_ERROR(TooFewFrames);
ICESEG_DEFINE_ERROR(WidthMismatch);
ICESEG_DEFINE_ERROR(EmptySelection);
ICESEG_DEFINE_ERROR(NoTrainableData);
ICESEG_DEFINE_ERROR(InsufficientPool);
ICESEG_DEFINE_ERROR(InvalidArgument);
ICESEG_DEFINE_ERROR(IoError);
ICESEG_DEFINE_ERROR(FormatError);

#undef ICESEG_DEFINE_ERROR

class UnknownPixelValue : public Error {
 public:
  UnknownPixelValue(int value, int row, int col)
      : Error("unknown mask pixel value " + std::to_string(value) + " at (" +
              std::to_string(row) + ", " + std::to_string(col) + ")"),
        value_(value),
        row_(row),
        col_(col) {}

  int value() const noexcept { return value_; }
  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }

 private:
  int value_;
  int row_;
  int col_;
};

}  // namespace iceseg
