#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>

namespace housegan {

/// Side length of the layout canvas in pixels.
inline constexpr int kCanvasSize = 256;

/// Rooms whose boxes are closer than this (strictly) are adjacent.
inline constexpr int kAdjacencyThreshold = 8;

/// Closed axis-aligned box in canvas pixels. x grows rightward, y downward.
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  constexpr int width() const { return x1 - x0; }
  constexpr int height() const { return y1 - y0; }
  constexpr std::int64_t area() const {
    return static_cast<std::int64_t>(width()) * height();
  }
  constexpr bool well_formed() const { return x0 <= x1 && y0 <= y1; }
  constexpr bool on_canvas() const {
    return well_formed() && x0 >= 0 && y0 >= 0 && x1 <= kCanvasSize &&
           y1 <= kCanvasSize;
  }
  /// Containment of a (possibly fractional) point, boundary inclusive.
  constexpr bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }

  friend constexpr auto operator<=>(const Box&, const Box&) = default;
};

/// Rectilinear box distance: the sum of the per-axis separation gaps.
/// Zero when the boxes touch or overlap.
constexpr int manhattan_gap(const Box& a, const Box& b) {
  const int gap_x = std::max(0, std::max(a.x0, b.x0) - std::min(a.x1, b.x1));
  const int gap_y = std::max(0, std::max(a.y0, b.y0) - std::min(a.y1, b.y1));
  return gap_x + gap_y;
}

constexpr bool rooms_adjacent(const Box& a, const Box& b) {
  return manhattan_gap(a, b) < kAdjacencyThreshold;
}

}  // namespace housegan
