#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "housegan/core/diagram.hpp"
#include "housegan/core/error.hpp"

namespace housegan {

using Json = nlohmann::ordered_json;

// Wire formats:
//   diagram: {"nodes": [{"id": int, "type": int}], "edges": [[int, int], ...]}
//   layout:  {"canvas": 256, "rooms": [{"id": int, "type": int, "box": [x0, y0, x1, y1]}]}

inline Json diagram_to_json(const BubbleDiagram& d) {
  Json nodes = Json::array();
  for (int i = 0; i < d.size(); ++i) {
    nodes.push_back(Json{{"id", i}, {"type", code(d.type(i))}});
  }
  Json edges = Json::array();
  for (auto [a, b] : d.edges()) edges.push_back(Json::array({a, b}));
  return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

namespace detail {

inline int json_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) {
    throw ValidationError(std::string("expected integer for ") + what);
  }
  return j.get<int>();
}

inline RoomType json_room_type(const Json& j) {
  const int t = json_int(j, "type");
  if (!is_valid_room_code(t)) {
    throw ValidationError("room type code out of range: " + std::to_string(t));
  }
  return static_cast<RoomType>(t);
}

}  // namespace detail

/// Parses and validates. Node ids must be exactly 0..n-1 in order.
inline BubbleDiagram diagram_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
    throw ValidationError("diagram needs a \"nodes\" array");
  }
  std::vector<RoomType> types;
  int expected = 0;
  for (const Json& node : j["nodes"]) {
    if (!node.is_object() || !node.contains("id") || !node.contains("type")) {
      throw ValidationError("diagram node needs \"id\" and \"type\"");
    }
    const int id = detail::json_int(node["id"], "node id");
    if (id != expected) {
      throw ValidationError("node ids must be contiguous from 0; expected " +
                            std::to_string(expected) + ", got " + std::to_string(id));
    }
    types.push_back(detail::json_room_type(node["type"]));
    ++expected;
  }
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw ValidationError("\"edges\" must be an array");
    for (const Json& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2) {
        throw ValidationError("edge must be a pair [a, b]");
      }
      edges.emplace_back(detail::json_int(e[0], "edge endpoint"),
                         detail::json_int(e[1], "edge endpoint"));
    }
  }
  return BubbleDiagram(std::move(types), std::move(edges));
}

inline Json layout_to_json(const Layout& l) {
  Json rooms = Json::array();
  for (int i = 0; i < l.size(); ++i) {
    const Box& b = l.box(i);
    rooms.push_back(Json{{"id", i},
                         {"type", code(l.type(i))},
                         {"box", Json::array({b.x0, b.y0, b.x1, b.y1})}});
  }
  return Json{{"canvas", kCanvasSize}, {"rooms", std::move(rooms)}};
}

inline Layout layout_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("rooms") || !j["rooms"].is_array()) {
    throw ValidationError("layout needs a \"rooms\" array");
  }
  if (j.contains("canvas") && detail::json_int(j["canvas"], "canvas") != kCanvasSize) {
    throw ValidationError("unsupported canvas size");
  }
  std::vector<RoomType> types;
  std::vector<Box> boxes;
  int expected = 0;
  for (const Json& room : j["rooms"]) {
    if (!room.is_object() || !room.contains("box") || !room.contains("type")) {
      throw ValidationError("layout room needs \"type\" and \"box\"");
    }
    if (room.contains("id") && detail::json_int(room["id"], "room id") != expected) {
      throw ValidationError("room ids must be contiguous from 0");
    }
    const Json& b = room["box"];
    if (!b.is_array() || b.size() != 4) throw ValidationError("box must be [x0,y0,x1,y1]");
    types.push_back(detail::json_room_type(room["type"]));
    boxes.push_back(Box{detail::json_int(b[0], "box"), detail::json_int(b[1], "box"),
                        detail::json_int(b[2], "box"), detail::json_int(b[3], "box")});
    ++expected;
  }
  return Layout(std::move(types), std::move(boxes));
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace housegan
