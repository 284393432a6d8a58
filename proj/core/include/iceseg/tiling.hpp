#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "iceseg/augment.hpp"
#include "iceseg/error.hpp"
#include "iceseg/grid.hpp"
#include "iceseg/labels.hpp"

namespace iceseg {

/// Stride-K decomposition of a frame. The frame is reflection-padded up to
/// the next multiple of K in each dimension; tiles cover the padded frame
/// exactly, in row-major order.
struct TileLayout {
  int frame_rows = 0;
  int frame_cols = 0;
  int tile_size = 0;
  int padded_rows = 0;
  int padded_cols = 0;
  std::vector<WindowOrigin> origins;

  int tiles_down() const noexcept { return tile_size ? padded_rows / tile_size : 0; }
  int tiles_across() const noexcept { return tile_size ? padded_cols / tile_size : 0; }

  friend bool operator==(const TileLayout&, const TileLayout&) = default;
};

TileLayout make_tile_layout(int frame_rows, int frame_cols, int tile_size);

template <typename T>
struct TiledFrame {
  std::vector<Grid<T>> tiles;
  TileLayout layout;
};

/// Cuts `frame` into K x K tiles; out-of-frame pixels are mirrored.
template <typename T>
TiledFrame<T> tile(const Grid<T>& frame, int tile_size) {
  if (frame.empty()) throw EmptyInput("cannot tile an empty frame");
  TiledFrame<T> out;
  out.layout = make_tile_layout(frame.rows(), frame.cols(), tile_size);
  out.tiles.reserve(out.layout.origins.size());
  for (const WindowOrigin& o : out.layout.origins) {
    Grid<T> t(tile_size, tile_size);
    for (int r = 0; r < tile_size; ++r) {
      const int sr = reflect_index(o.row + r, frame.rows());
      for (int c = 0; c < tile_size; ++c) t(r, c) = frame(sr, reflect_index(o.col + c, frame.cols()));
    }
    out.tiles.push_back(std::move(t));
  }
  return out;
}

/// Places tiles at their origins and crops back to the frame size.
/// Throws LayoutMismatch on wrong tile count or tile size.
template <typename T>
Grid<T> stitch(const std::vector<Grid<T>>& tiles, const TileLayout& layout) {
  if (tiles.size() != layout.origins.size())
    throw LayoutMismatch("expected " + std::to_string(layout.origins.size()) + " tiles, got " +
                         std::to_string(tiles.size()));
  Grid<T> out(layout.frame_rows, layout.frame_cols);
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    const Grid<T>& t = tiles[k];
    if (t.rows() != layout.tile_size || t.cols() != layout.tile_size)
      throw LayoutMismatch("tile " + std::to_string(k) + " is " + std::to_string(t.rows()) + "x" +
                           std::to_string(t.cols()) + ", expected " +
                           std::to_string(layout.tile_size));
    const WindowOrigin o = layout.origins[k];
    const int rows = std::min(layout.tile_size, layout.frame_rows - o.row);
    const int cols = std::min(layout.tile_size, layout.frame_cols - o.col);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out(o.row + r, o.col + c) = t(r, c);
  }
  return out;
}

}  // namespace iceseg
