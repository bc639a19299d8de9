#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <set>
#include <vector>

#include "housegan/core/json_io.hpp"
#include "housegan/dataio/mask.hpp"

namespace housegan {

using Rgb = std::array<std::uint8_t, 3>;

/// Room-type colors. The palette is part of the diversity metric's contract:
/// changing a color changes every rendered feature.
class Palette {
 public:
  static constexpr Rgb kBackground = {255, 255, 255};

  Palette() : colors_(kDefaultColors) {}
  explicit Palette(std::array<Rgb, kNumRoomTypes> colors) : colors_(colors) { validate(); }

  const Rgb& color(RoomType t) const { return colors_[static_cast<std::size_t>(code(t))]; }
  const Rgb& background() const { return kBackground; }

  Json to_json() const {
    Json j = Json::object();
    for (int t = 0; t < kNumRoomTypes; ++t) {
      const Rgb& c = colors_[static_cast<std::size_t>(t)];
      j[std::to_string(t)] = Json::array({c[0], c[1], c[2]});
    }
    return j;
  }

  /// {"0": [r, g, b], ..., "9": [r, g, b]}
  static Palette from_json(const Json& j) {
    std::array<Rgb, kNumRoomTypes> colors{};
    for (int t = 0; t < kNumRoomTypes; ++t) {
      const std::string key = std::to_string(t);
      if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
        throw FormatError("palette entry " + key + " must be [r, g, b]");
      }
      for (int k = 0; k < 3; ++k) {
        const int v = j[key][static_cast<std::size_t>(k)].get<int>();
        if (v < 0 || v > 255) throw FormatError("palette channel out of range");
        colors[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(v);
      }
    }
    return Palette(colors);
  }

  static Palette load(const std::filesystem::path& path) { return from_json(read_json_file(path)); }

  friend bool operator==(const Palette&, const Palette&) = default;

 private:
  void validate() const {
    std::set<Rgb> seen(colors_.begin(), colors_.end());
    if (seen.size() != colors_.size() || seen.count(kBackground)) {
      throw ValidationError("palette needs ten distinct non-background colors");
    }
  }

  // Frozen; mirrored in config/palette.json.
  static constexpr std::array<Rgb, kNumRoomTypes> kDefaultColors = {{
      {230, 25, 75},    // living room
      {60, 180, 75},    // kitchen
      {255, 165, 0},    // bedroom
      {0, 130, 200},    // bathroom
      {145, 30, 180},   // closet
      {70, 240, 240},   // balcony
      {128, 128, 128},  // corridor
      {240, 50, 230},   // dining room
      {170, 110, 40},   // laundry room
      {0, 0, 0},        // unknown
  }};

  std::array<Rgb, kNumRoomTypes> colors_;
};

/// Row-major RGB raster.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Rgb pixel(int row, int col) const {
    const std::size_t i = (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                           static_cast<std::size_t>(col)) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  friend bool operator==(const Image&, const Image&) = default;
};

/// Paint order: decreasing area, ties by ascending room index.
inline std::vector<int> paint_order(const Layout& layout) {
  std::vector<int> order(static_cast<std::size_t>(layout.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return layout.box(a).area() > layout.box(b).area();
  });
  return order;
}

/// Renders rooms onto a white background; smaller rooms paint over larger.
/// A pixel is covered when its center lies inside the box. Rooms flagged in
/// `skip` (e.g. degenerate generated rooms) are not painted.
inline Image rasterize(const Layout& layout, const Palette& palette, int resolution,
                       const std::vector<bool>& skip = {}) {
  const int cell = cell_size(resolution);
  Image img{resolution, resolution,
            std::vector<std::uint8_t>(static_cast<std::size_t>(resolution) * resolution * 3)};
  for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
    img.rgb[i] = Palette::kBackground[0];
    img.rgb[i + 1] = Palette::kBackground[1];
    img.rgb[i + 2] = Palette::kBackground[2];
  }
  for (int room : paint_order(layout)) {
    if (!skip.empty() && skip[static_cast<std::size_t>(room)]) continue;
    const Box& b = layout.box(room);
    const Rgb& c = palette.color(layout.type(room));
    for (int r = 0; r < resolution; ++r) {
      const double cy = (r + 0.5) * cell;
      if (cy < b.y0 || cy > b.y1) continue;
      for (int col = 0; col < resolution; ++col) {
        const double cx = (col + 0.5) * cell;
        if (cx < b.x0 || cx > b.x1) continue;
        const std::size_t i = (static_cast<std::size_t>(r) * static_cast<std::size_t>(resolution) +
                               static_cast<std::size_t>(col)) * 3;
        img.rgb[i] = c[0];
        img.rgb[i + 1] = c[1];
        img.rgb[i + 2] = c[2];
      }
    }
  }
  return img;
}

/// Binary PPM, handy for eyeballing renders.
inline void write_ppm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
}

}  // namespace housegan
