#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "iceseg/grid.hpp"

namespace iceseg {

/// Reads any PNG and converts it to 8-bit RGB. Throws IoError / FormatError.
RgbImage read_rgb_png(const std::filesystem::path& path);

/// Reads a PNG that must be single-channel 8-bit (palette and 16-bit inputs
/// are rejected, since a conversion would silently change label values).
GrayImage read_gray_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const GrayImage& image);

/// Regular files with a .png extension, sorted lexicographically by filename.
std::vector<std::filesystem::path> list_png_files(const std::filesystem::path& dir);

}  // namespace iceseg
