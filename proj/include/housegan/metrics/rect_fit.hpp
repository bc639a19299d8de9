#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "housegan/dataio/mask.hpp"

namespace housegan {

/// Inclusive cell range of the positive pixels of one mask.
struct GridBox {
  int row0 = 0, col0 = 0, row1 = -1, col1 = -1;

  bool empty() const { return row1 < row0; }
  friend bool operator==(const GridBox&, const GridBox&) = default;
};

/// Sentinel box for rooms whose mask never exceeds the threshold.
inline constexpr Box kDegenerateBox{0, 0, 0, 0};

struct FittedLayout {
  /// Degenerate rooms hold kDegenerateBox.
  Layout layout;
  std::vector<bool> degenerate;

  int degenerate_count() const { return static_cast<int>(std::count(degenerate.begin(), degenerate.end(), true)); }

  /// Layout restricted to the rooms that produced a box.
  Layout valid_rooms() const {
    std::vector<bool> keep(degenerate.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = !degenerate[i];
    return layout.subset(keep);
  }
};

/// Tightest cell range covering every value > 0.
inline GridBox positive_extent(std::span<const double> values, int resolution) {
  GridBox g{resolution, resolution, -1, -1};
  for (int r = 0; r < resolution; ++r) {
    for (int c = 0; c < resolution; ++c) {
      if (values[static_cast<std::size_t>(r) * resolution + c] > 0.0) {
        g.row0 = std::min(g.row0, r);
        g.col0 = std::min(g.col0, c);
        g.row1 = std::max(g.row1, r);
        g.col1 = std::max(g.col1, c);
      }
    }
  }
  if (g.row1 < 0) return GridBox{};
  return g;
}

/// Canvas box whose cell-center footprint is exactly the given cells.
inline Box canvas_box(const GridBox& g, int resolution) {
  const int cell = cell_size(resolution);
  return Box{g.col0 * cell, g.row0 * cell, (g.col1 + 1) * cell, (g.row1 + 1) * cell};
}

/// Thresholds every mask at 0 and fits the tightest axis-aligned box, scaled
/// from the mask grid to the 256 canvas.
inline FittedLayout fit_rectangles(const std::vector<RoomType>& types, const std::vector<RoomMask>& masks) {
  if (types.size() != masks.size()) throw ValidationError("one mask per room is required");
  std::vector<Box> boxes;
  std::vector<bool> degenerate;
  for (const RoomMask& m : masks) {
    const GridBox g = positive_extent(m.values(), m.resolution());
    degenerate.push_back(g.empty());
    boxes.push_back(g.empty() ? kDegenerateBox : canvas_box(g, m.resolution()));
  }
  return {Layout(types, std::move(boxes)), std::move(degenerate)};
}

}  // namespace housegan
