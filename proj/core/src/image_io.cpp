#include "iceseg/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <memory>

#include "iceseg/error.hpp"

namespace iceseg {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return f;
}

[[noreturn]] void on_png_error(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct DecodedPng {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

// Decodes to 8-bit gray or RGB. When `require_gray` is set, anything that is
// not already 8-bit single channel is rejected.
DecodedPng decode(const std::filesystem::path& path, bool require_gray) {
  FilePtr f = open_file(path, "rb");
  std::uint8_t sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw FormatError("'" + path.string() + "' is not a PNG file");

  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  DecodedPng out;
  volatile bool bad_format = false;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("'" + path.string() + "': " + err);
  }

  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (require_gray) {
    bad_format = color != PNG_COLOR_TYPE_GRAY || depth != 8;
  } else {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_strip_16(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
      png_set_gray_to_rgb(png);
  }

  if (!bad_format) {
    png_read_update_info(png, info);
    out.rows = static_cast<int>(png_get_image_height(png, info));
    out.cols = static_cast<int>(png_get_image_width(png, info));
    out.channels = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    out.data.resize(stride * out.rows);
    rows.resize(out.rows);
    for (int r = 0; r < out.rows; ++r) rows[r] = out.data.data() + stride * r;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);

  if (bad_format)
    throw FormatError("'" + path.string() + "' is not an 8-bit single-channel PNG");
  return out;
}

void encode(const std::filesystem::path& path, int rows, int cols, int channels,
            const std::uint8_t* data) {
  if (rows <= 0 || cols <= 0) throw InvalidArgument("cannot write an empty image");
  FilePtr f = open_file(path, "wb");

  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  std::vector<png_bytep> row_ptrs(rows);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("'" + path.string() + "': " + err);
  }

  png_init_io(png, f.get());
  png_set_IHDR(png, info, cols, rows, 8, channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 3);
  for (int r = 0; r < rows; ++r)
    row_ptrs[r] = const_cast<png_bytep>(data + static_cast<std::size_t>(r) * cols * channels);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

RgbImage read_rgb_png(const std::filesystem::path& path) {
  DecodedPng d = decode(path, false);
  std::vector<Rgb> px(static_cast<std::size_t>(d.rows) * d.cols);
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = Rgb{d.data[3 * i], d.data[3 * i + 1], d.data[3 * i + 2]};
  return RgbImage(d.rows, d.cols, std::move(px));
}

GrayImage read_gray_png(const std::filesystem::path& path) {
  DecodedPng d = decode(path, true);
  return GrayImage(d.rows, d.cols, std::move(d.data));
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  static_assert(sizeof(Rgb) == 3);
  encode(path, image.rows(), image.cols(), 3,
         reinterpret_cast<const std::uint8_t*>(image.values().data()));
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
  encode(path, image.rows(), image.cols(), 1, image.values().data());
}

std::vector<std::filesystem::path> list_png_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

}  // namespace iceseg
