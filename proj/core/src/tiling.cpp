#include "iceseg/tiling.hpp"

namespace iceseg {

TileLayout make_tile_layout(int frame_rows, int frame_cols, int tile_size) {
  if (frame_rows < 1 || frame_cols < 1) throw EmptyInput("cannot tile an empty frame");
  if (tile_size < 1) throw InvalidArgument("tile size must be positive");

  auto round_up = [tile_size](int n) { return (n + tile_size - 1) / tile_size * tile_size; };
  TileLayout layout;
  layout.frame_rows = frame_rows;
  layout.frame_cols = frame_cols;
  layout.tile_size = tile_size;
  layout.padded_rows = round_up(frame_rows);
  layout.padded_cols = round_up(frame_cols);
  for (int r = 0; r < layout.padded_rows; r += tile_size)
    for (int c = 0; c < layout.padded_cols; c += tile_size) layout.origins.push_back({r, c});
  return layout;
}

}  // namespace iceseg
