#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "housegan/core/random.hpp"
#include "housegan/dataio/raster.hpp"

namespace housegan {

/// Maps a rendered layout to a fixed-length feature vector for the Fréchet
/// distance. Stand-in for Inception activations; scores are only comparable
/// between runs that use the same extractor id and palette.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::string id() const = 0;
  virtual int dim() const = 0;
  /// `skip` marks rooms that are not drawn (degenerate generated rooms).
  virtual std::vector<double> extract(const Layout& layout, const std::vector<bool>& skip) const = 0;
};

/// 32x32 RGB rendering in [0, 1], flattened and reduced to 64 values by a
/// fixed Gaussian random projection.
class PixelProjectionFeatures final : public FeatureExtractor {
 public:
  static constexpr int kResolution = 32;
  static constexpr int kDim = 64;
  static constexpr int kInput = kResolution * kResolution * 3;

  explicit PixelProjectionFeatures(Palette palette = Palette()) : palette_(std::move(palette)) {
    RandomStream rs(0x5eed, {static_cast<std::uint64_t>(StreamDomain::kProjection)});
    projection_.resize(static_cast<std::size_t>(kDim) * kInput);
    const double scale = 1.0 / std::sqrt(static_cast<double>(kInput));
    for (double& w : projection_) w = rs.normal() * scale;
  }

  std::string id() const override { return "pixels-rp64"; }
  int dim() const override { return kDim; }

  std::vector<double> extract(const Layout& layout, const std::vector<bool>& skip) const override {
    const Image img = rasterize(layout, palette_, kResolution, skip);
    std::vector<double> out(kDim, 0.0);
    for (int k = 0; k < kDim; ++k) {
      const double* row = projection_.data() + static_cast<std::size_t>(k) * kInput;
      double acc = 0;
      for (int i = 0; i < kInput; ++i) acc += row[i] * (img.rgb[static_cast<std::size_t>(i)] / 255.0);
      out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
  }

 private:
  Palette palette_;
  std::vector<double> projection_;
};

/// Per room type: room count, covered area fraction, and the area-weighted
/// box-center x and y (canvas-normalized). 40 values.
class TypeHistogramFeatures final : public FeatureExtractor {
 public:
  std::string id() const override { return "type-hist"; }
  int dim() const override { return 4 * kNumRoomTypes; }

  std::vector<double> extract(const Layout& layout, const std::vector<bool>& skip) const override {
    std::vector<double> out(static_cast<std::size_t>(dim()), 0.0);
    std::vector<double> area(kNumRoomTypes, 0.0);
    const double canvas = static_cast<double>(kCanvasSize) * kCanvasSize;
    for (int i = 0; i < layout.size(); ++i) {
      if (!skip.empty() && skip[static_cast<std::size_t>(i)]) continue;
      const auto t = static_cast<std::size_t>(code(layout.type(i)));
      const Box& b = layout.box(i);
      const double a = static_cast<double>(b.area());
      out[4 * t] += 1.0;
      out[4 * t + 1] += a / canvas;
      out[4 * t + 2] += a * 0.5 * (b.x0 + b.x1) / kCanvasSize;
      out[4 * t + 3] += a * 0.5 * (b.y0 + b.y1) / kCanvasSize;
      area[t] += a;
    }
    for (std::size_t t = 0; t < area.size(); ++t) {
      if (area[t] > 0) {
        out[4 * t + 2] /= area[t];
        out[4 * t + 3] /= area[t];
      }
    }
    return out;
  }
};

inline std::vector<std::string> feature_extractor_ids() { return {"pixels-rp64", "type-hist"}; }

inline std::unique_ptr<FeatureExtractor> make_feature_extractor(const std::string& id, const Palette& palette = Palette()) {
  if (id == "pixels-rp64") return std::make_unique<PixelProjectionFeatures>(palette);
  if (id == "type-hist") return std::make_unique<TypeHistogramFeatures>();
  throw ValidationError("unknown feature extractor: " + id);
}

}  // namespace housegan
