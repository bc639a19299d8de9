#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "housegan/core/json_io.hpp"
#include "housegan/core/random.hpp"

namespace housegan {

/// Room-count buckets used for the leave-one-group-out protocol.
enum class Group : int { k1to3 = 0, k4to6, k7to9, k10to12, k13plus };

inline constexpr int kNumGroups = 5;
inline constexpr std::array<Group, kNumGroups> kAllGroups = {
    Group::k1to3, Group::k4to6, Group::k7to9, Group::k10to12, Group::k13plus};
inline constexpr std::array<std::string_view, kNumGroups> kGroupNames = {
    "1-3", "4-6", "7-9", "10-12", "13+"};

inline std::string_view group_name(Group g) {
  return kGroupNames[static_cast<std::size_t>(g)];
}

inline Group parse_group(std::string_view name) {
  for (Group g : kAllGroups) {
    if (group_name(g) == name) return g;
  }
  throw ValidationError("unknown group id: " + std::string(name));
}

inline Group group_of(int room_count) {
  if (room_count < 1) throw ValidationError("room count must be positive");
  if (room_count <= 3) return Group::k1to3;
  if (room_count <= 6) return Group::k4to6;
  if (room_count <= 9) return Group::k7to9;
  if (room_count <= 12) return Group::k10to12;
  return Group::k13plus;
}

/// Inclusive room-count range of a group (13+ is capped at kMaxRooms).
inline std::pair<int, int> group_room_range(Group g) {
  switch (g) {
    case Group::k1to3: return {1, 3};
    case Group::k4to6: return {4, 6};
    case Group::k7to9: return {7, 9};
    case Group::k10to12: return {10, 12};
    case Group::k13plus: return {13, kMaxRooms};
  }
  return {1, kMaxRooms};
}

/// One node per room; rooms i and j are connected iff their boxes are closer
/// than kAdjacencyThreshold pixels.
inline BubbleDiagram derive_diagram(const Layout& layout) {
  std::vector<Edge> edges;
  for (int i = 0; i < layout.size(); ++i) {
    for (int j = i + 1; j < layout.size(); ++j) {
      if (rooms_adjacent(layout.box(i), layout.box(j))) edges.emplace_back(i, j);
    }
  }
  return BubbleDiagram(layout.types(), std::move(edges));
}

struct Sample {
  std::string id;
  Layout layout;
  BubbleDiagram diagram;

  Group group() const { return group_of(layout.size()); }
};

struct Corpus {
  std::vector<Sample> samples;
  std::uint64_t seed = 0;

  std::array<int, kNumGroups> group_counts() const {
    std::array<int, kNumGroups> counts{};
    for (const Sample& s : samples) ++counts[static_cast<std::size_t>(s.group())];
    return counts;
  }

  std::vector<const Sample*> in_group(Group g) const {
    std::vector<const Sample*> out;
    for (const Sample& s : samples) {
      if (s.group() == g) out.push_back(&s);
    }
    return out;
  }
};

struct Split {
  std::vector<const Sample*> train;
  std::vector<const Sample*> test;
};

/// Test set is the target group; everything else trains.
inline Split split_groups(const Corpus& corpus, Group target) {
  Split split;
  for (const Sample& s : corpus.samples) {
    (s.group() == target ? split.test : split.train).push_back(&s);
  }
  return split;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

/// Average rooms per type and group (columns 1-3 .. 13+), used as sampling
/// weights for room types.
inline constexpr std::array<std::array<double, kNumRoomTypes>, kNumGroups> kTypeFrequencies = {{
    {0.0, 0.6, 0.4, 0.7, 0.3, 0.2, 0.1, 0.0, 0.0, 0.0},
    {0.0, 1.0, 0.8, 1.6, 1.0, 0.6, 0.1, 0.0, 0.0, 0.0},
    {0.1, 1.2, 1.3, 2.6, 1.6, 0.9, 0.4, 0.0, 0.0, 0.0},
    {0.3, 1.1, 2.0, 3.0, 2.4, 1.0, 1.0, 0.0, 0.0, 0.0},
    {0.3, 1.3, 2.8, 3.4, 3.6, 1.3, 1.4, 0.0, 0.0, 0.0},
}};

struct SynthConfig {
  std::array<int, kNumGroups> samples_per_group = {20, 20, 20, 20, 20};
  /// Upper room count for the 13+ group.
  int max_rooms = 16;
  /// Added to every type weight so rare types still occur.
  double type_weight_floor = 0.02;
  /// Smallest room side, in pixels.
  int min_side = 12;

  void validate() const {
    if (max_rooms < 13 || max_rooms > kMaxRooms) {
      throw ValidationError("max_rooms must be in [13, " + std::to_string(kMaxRooms) + "]");
    }
    for (int n : samples_per_group) {
      if (n < 0) throw ValidationError("negative sample count");
    }
    if (min_side < 1 || min_side > 32) throw ValidationError("min_side must be in [1, 32]");
  }
};

namespace detail {

inline std::vector<Box> slice_footprint(int rooms, int min_side, RandomStream& rs) {
  for (;;) {
    const int w = rs.uniform_int(144, kCanvasSize);
    const int h = rs.uniform_int(144, kCanvasSize);
    const int x0 = rs.uniform_int(0, kCanvasSize - w);
    const int y0 = rs.uniform_int(0, kCanvasSize - h);
    std::vector<Box> rects = {Box{x0, y0, x0 + w, y0 + h}};
    bool stuck = false;
    while (static_cast<int>(rects.size()) < rooms && !stuck) {
      // Pick a rectangle with probability proportional to its area.
      std::int64_t total = 0;
      for (const Box& r : rects) total += r.area();
      std::int64_t pick = static_cast<std::int64_t>(rs.uniform() * static_cast<double>(total));
      std::size_t idx = 0;
      while (idx + 1 < rects.size() && pick >= rects[idx].area()) {
        pick -= rects[idx].area();
        ++idx;
      }
      stuck = true;
      for (std::size_t attempt = 0; attempt <= rects.size(); ++attempt) {
        const std::size_t k = (idx + attempt) % rects.size();
        const Box r = rects[k];
        const bool can_x = r.width() >= 2 * min_side;
        const bool can_y = r.height() >= 2 * min_side;
        if (!can_x && !can_y) continue;
        bool along_x = can_x && (!can_y || r.width() > r.height() ||
                                 (r.width() == r.height() && rs.uniform() < 0.5));
        const int extent = along_x ? r.width() : r.height();
        const int lo = std::max(min_side, static_cast<int>(0.3 * extent));
        const int hi = std::min(extent - min_side, static_cast<int>(0.7 * extent));
        const int cut = lo <= hi ? rs.uniform_int(lo, hi) : extent / 2;
        Box a = r, b = r;
        if (along_x) {
          a.x1 = r.x0 + cut;
          b.x0 = r.x0 + cut;
        } else {
          a.y1 = r.y0 + cut;
          b.y0 = r.y0 + cut;
        }
        rects[k] = a;
        rects.push_back(b);
        stuck = false;
        break;
      }
    }
    if (!stuck) return rects;
  }
}

inline RoomType sample_type(Group g, double floor, RandomStream& rs) {
  const auto& freq = kTypeFrequencies[static_cast<std::size_t>(g)];
  double total = 0.0;
  for (double f : freq) total += f + floor;
  double u = rs.uniform() * total;
  for (int t = 0; t < kNumRoomTypes; ++t) {
    u -= freq[static_cast<std::size_t>(t)] + floor;
    if (u < 0.0) return static_cast<RoomType>(t);
  }
  return RoomType::kUnknown;
}

inline std::string sample_id(Group g, int index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  const std::array<std::string_view, kNumGroups> prefix = {"g13", "g46", "g79", "g1012", "g13p"};
  return std::string(prefix[static_cast<std::size_t>(g)]) + "_" + digits;
}

}  // namespace detail

/// Procedural stand-in for a real floorplan corpus: each layout recursively
/// slices a random footprint into rooms, room types follow per-group type
/// frequencies, and the diagram is derived from the boxes. Deterministic in
/// (config, seed).
inline Corpus synthesize_corpus(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  Corpus corpus;
  corpus.seed = seed;
  for (Group g : kAllGroups) {
    auto [lo, hi] = group_room_range(g);
    if (g == Group::k13plus) hi = config.max_rooms;
    const int count = config.samples_per_group[static_cast<std::size_t>(g)];
    for (int i = 0; i < count; ++i) {
      RandomStream rs(seed, {static_cast<std::uint64_t>(StreamDomain::kCorpus),
                             static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(i)});
      const int rooms = rs.uniform_int(lo, hi);
      std::vector<Box> boxes = detail::slice_footprint(rooms, config.min_side, rs);
      std::vector<RoomType> types;
      types.reserve(boxes.size());
      for (std::size_t k = 0; k < boxes.size(); ++k) {
        types.push_back(detail::sample_type(g, config.type_weight_floor, rs));
      }
      Layout layout(std::move(types), std::move(boxes));
      BubbleDiagram diagram = derive_diagram(layout);
      corpus.samples.push_back(Sample{detail::sample_id(g, i), std::move(layout), std::move(diagram)});
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// On-disk format: DIR/manifest.json plus DIR/{group}/{sample_id}.json, each
// sample holding {"id", "layout", "diagram"} in the core wire formats.

inline Json sample_to_json(const Sample& s) {
  return Json{{"id", s.id}, {"layout", layout_to_json(s.layout)}, {"diagram", diagram_to_json(s.diagram)}};
}

/// Rejects samples whose stored diagram disagrees with the derived one.
inline Sample sample_from_json(const Json& j) {
  if (!j.contains("id") || !j.contains("layout")) throw FormatError("sample needs id and layout");
  Layout layout = layout_from_json(j["layout"]);
  BubbleDiagram derived = derive_diagram(layout);
  if (j.contains("diagram")) {
    BubbleDiagram stored = diagram_from_json(j["diagram"]);
    if (!(stored == derived)) {
      throw FormatError("sample " + j["id"].get<std::string>() +
                        ": stored diagram does not match its layout");
    }
  }
  return Sample{j["id"].get<std::string>(), std::move(layout), std::move(derived)};
}

inline void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Json counts = Json::object();
  const auto per_group = corpus.group_counts();
  for (Group g : kAllGroups) {
    fs::create_directories(dir / std::string(group_name(g)));
    counts[std::string(group_name(g))] = per_group[static_cast<std::size_t>(g)];
  }
  for (const Sample& s : corpus.samples) {
    write_json_file(dir / std::string(group_name(s.group())) / (s.id + ".json"), sample_to_json(s));
  }
  write_json_file(dir / "manifest.json",
                  Json{{"format", "housegan-corpus/1"},
                       {"seed", corpus.seed},
                       {"total", corpus.samples.size()},
                       {"counts", counts}});
}

inline Corpus load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw FormatError("corpus directory not found: " + dir.string());
  Corpus corpus;
  if (fs::exists(dir / "manifest.json")) {
    const Json manifest = read_json_file(dir / "manifest.json");
    corpus.seed = manifest.value("seed", std::uint64_t{0});
  }
  for (Group g : kAllGroups) {
    const fs::path gdir = dir / std::string(group_name(g));
    if (!fs::is_directory(gdir)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(gdir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      Sample s = sample_from_json(read_json_file(f));
      if (s.group() != g) {
        throw FormatError(f.string() + ": room count does not belong to group " +
                          std::string(group_name(g)));
      }
      corpus.samples.push_back(std::move(s));
    }
  }
  return corpus;
}

}  // namespace housegan
