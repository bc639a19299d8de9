#pragma once

#include <span>
#include <vector>

#include "housegan/core/diagram.hpp"

namespace housegan {

/// Square per-room segmentation, row-major, +1 foreground / -1 background
/// for ground truth. Generated masks are raw tanh outputs in [-1, 1].
class RoomMask {
 public:
  RoomMask() = default;
  explicit RoomMask(int resolution, double fill = -1.0)
      : resolution_(resolution),
        values_(static_cast<std::size_t>(resolution) * resolution, fill) {}
  RoomMask(int resolution, std::vector<double> values)
      : resolution_(resolution), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(resolution) * resolution) {
      throw ValidationError("mask value count does not match resolution");
    }
  }

  int resolution() const { return resolution_; }
  double at(int row, int col) const { return values_[index(row, col)]; }
  double& at(int row, int col) { return values_[index(row, col)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  friend bool operator==(const RoomMask&, const RoomMask&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(resolution_) +
           static_cast<std::size_t>(col);
  }

  int resolution_ = 0;
  std::vector<double> values_;
};

inline constexpr int kMaskResolution = 32;

/// Canvas pixels per mask cell at the given mask resolution.
inline int cell_size(int resolution) {
  if (resolution <= 0 || kCanvasSize % resolution != 0) {
    throw ValidationError("mask resolution must divide the canvas size");
  }
  return kCanvasSize / resolution;
}

/// A cell is foreground iff its center lies inside the (closed) box.
inline RoomMask mask_from_box(const Box& box, int resolution = kMaskResolution) {
  const int cell = cell_size(resolution);
  RoomMask mask(resolution, -1.0);
  for (int r = 0; r < resolution; ++r) {
    const double cy = (r + 0.5) * cell;
    for (int c = 0; c < resolution; ++c) {
      const double cx = (c + 0.5) * cell;
      if (box.contains(cx, cy)) mask.at(r, c) = 1.0;
    }
  }
  return mask;
}

inline std::vector<RoomMask> masks_from_layout(const Layout& layout,
                                               int resolution = kMaskResolution) {
  std::vector<RoomMask> masks;
  masks.reserve(static_cast<std::size_t>(layout.size()));
  for (const Box& b : layout.boxes()) masks.push_back(mask_from_box(b, resolution));
  return masks;
}

}  // namespace housegan
