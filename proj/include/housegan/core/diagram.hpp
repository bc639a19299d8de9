#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "housegan/core/error.hpp"
#include "housegan/core/geometry.hpp"
#include "housegan/core/room_type.hpp"

namespace housegan {

/// Largest diagram any model accepts (fixed by the CNN-only encoding).
inline constexpr int kMaxRooms = 40;

/// Undirected edge stored with first < second.
using Edge = std::pair<int, int>;

/// Labeled undirected graph: node i is room i with types()[i]. Edges are a
/// set of unordered pairs, kept sorted and deduplicated.
class BubbleDiagram {
 public:
  BubbleDiagram() = default;

  BubbleDiagram(std::vector<RoomType> types, std::vector<Edge> edges)
      : types_(std::move(types)) {
    const int n = size();
    if (n < 1 || n > kMaxRooms) {
      throw ValidationError("diagram must have between 1 and " +
                            std::to_string(kMaxRooms) + " rooms, got " +
                            std::to_string(n));
    }
    for (RoomType t : types_) {
      if (!is_valid_room_code(code(t))) {
        throw ValidationError("invalid room type code");
      }
    }
    adjacency_.assign(static_cast<std::size_t>(n) * n, 0);
    for (auto [a, b] : edges) {
      if (a < 0 || b < 0 || a >= n || b >= n) {
        throw ValidationError("edge (" + std::to_string(a) + "," +
                              std::to_string(b) +
                              ") references a missing node");
      }
      if (a == b) {
        throw ValidationError("self-loop on node " + std::to_string(a));
      }
      if (a > b) std::swap(a, b);
      if (!adjacency_[index(a, b)]) {
        adjacency_[index(a, b)] = adjacency_[index(b, a)] = 1;
        edges_.emplace_back(a, b);
      }
    }
    std::sort(edges_.begin(), edges_.end());
  }

  int size() const { return static_cast<int>(types_.size()); }
  RoomType type(int node) const { return types_.at(static_cast<std::size_t>(node)); }
  const std::vector<RoomType>& types() const { return types_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_edge(int a, int b) const {
    return a != b && adjacency_[index(a, b)] != 0;
  }

  int degree(int node) const {
    int d = 0;
    for (int s = 0; s < size(); ++s) d += has_edge(node, s) ? 1 : 0;
    return d;
  }

  /// Relabels node i as perm[i]. perm must be a permutation of 0..n-1.
  BubbleDiagram permuted(std::span<const int> perm) const {
    check_permutation(perm, size());
    std::vector<RoomType> types(types_.size());
    for (int i = 0; i < size(); ++i) types[static_cast<std::size_t>(perm[i])] = types_[static_cast<std::size_t>(i)];
    std::vector<Edge> edges;
    edges.reserve(edges_.size());
    for (auto [a, b] : edges_) edges.emplace_back(perm[a], perm[b]);
    return BubbleDiagram(std::move(types), std::move(edges));
  }

  /// Same rooms, every pair connected.
  BubbleDiagram fully_connected() const {
    std::vector<Edge> edges;
    for (int a = 0; a < size(); ++a)
      for (int b = a + 1; b < size(); ++b) edges.emplace_back(a, b);
    return BubbleDiagram(types_, std::move(edges));
  }

  friend bool operator==(const BubbleDiagram& x, const BubbleDiagram& y) {
    return x.types_ == y.types_ && x.edges_ == y.edges_;
  }

  static void check_permutation(std::span<const int> perm, int n) {
    if (static_cast<int>(perm.size()) != n) {
      throw ValidationError("permutation length does not match node count");
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int p : perm) {
      if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)]) {
        throw ValidationError("not a permutation");
      }
      seen[static_cast<std::size_t>(p)] = 1;
    }
  }

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * types_.size() + static_cast<std::size_t>(b);
  }

  std::vector<RoomType> types_;
  std::vector<Edge> edges_;
  std::vector<char> adjacency_;
};

/// One axis-aligned box per room on the 256x256 canvas.
class Layout {
 public:
  Layout() = default;

  Layout(std::vector<RoomType> types, std::vector<Box> boxes)
      : types_(std::move(types)), boxes_(std::move(boxes)) {
    if (types_.size() != boxes_.size()) {
      throw ValidationError("layout types and boxes differ in length");
    }
    for (const Box& b : boxes_) {
      if (!b.on_canvas()) {
        throw ValidationError("box outside the canvas or inverted");
      }
    }
  }

  int size() const { return static_cast<int>(boxes_.size()); }
  const std::vector<RoomType>& types() const { return types_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  const Box& box(int room) const { return boxes_.at(static_cast<std::size_t>(room)); }
  RoomType type(int room) const { return types_.at(static_cast<std::size_t>(room)); }

  Layout permuted(std::span<const int> perm) const {
    BubbleDiagram::check_permutation(perm, size());
    std::vector<RoomType> types(types_.size());
    std::vector<Box> boxes(boxes_.size());
    for (int i = 0; i < size(); ++i) {
      types[static_cast<std::size_t>(perm[i])] = types_[static_cast<std::size_t>(i)];
      boxes[static_cast<std::size_t>(perm[i])] = boxes_[static_cast<std::size_t>(i)];
    }
    return Layout(std::move(types), std::move(boxes));
  }

  /// Keeps rooms whose flag in `keep` is set, renumbering them in order.
  Layout subset(const std::vector<bool>& keep) const {
    std::vector<RoomType> types;
    std::vector<Box> boxes;
    for (int i = 0; i < size(); ++i) {
      if (keep.at(static_cast<std::size_t>(i))) {
        types.push_back(types_[static_cast<std::size_t>(i)]);
        boxes.push_back(boxes_[static_cast<std::size_t>(i)]);
      }
    }
    return Layout(std::move(types), std::move(boxes));
  }

  friend bool operator==(const Layout&, const Layout&) = default;

 private:
  std::vector<RoomType> types_;
  std::vector<Box> boxes_;
};

}  // namespace housegan
