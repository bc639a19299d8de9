#include <gtest/gtest.h>

#include <climits>
#include <set>

#include "housegan/core/json_io.hpp"
#include "housegan/core/random.hpp"
#include "support/fixtures.hpp"

namespace housegan {
namespace {

TEST(RoomType, OneHotPositions) {
  const OneHot k = one_hot(RoomType::kKitchen);
  EXPECT_EQ(k, (OneHot{0, 1, 0, 0, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(one_hot(RoomType::kUnknown)[9], 1.0);
  std::set<OneHot> seen;
  for (int t = 0; t < kNumRoomTypes; ++t) seen.insert(one_hot(room_type_from_code(t)));
  EXPECT_EQ(seen.size(), 10U);
  EXPECT_EQ(room_type_name(RoomType::kLaundryRoom), "laundry room");
  EXPECT_THROW(room_type_from_code(10), std::out_of_range);
}

// Smallest L1 distance between integer points on the two boxes' outlines.
int lattice_gap(const Box& a, const Box& b) {
  auto outline = [](const Box& x) {
    std::vector<std::pair<int, int>> pts;
    for (int i = x.x0; i <= x.x1; ++i)
      for (int j = x.y0; j <= x.y1; ++j)
        if (i == x.x0 || i == x.x1 || j == x.y0 || j == x.y1) pts.emplace_back(i, j);
    return pts;
  };
  const auto pa = outline(a), pb = outline(b);
  int best = INT_MAX;
  for (auto [ax, ay] : pa)
    for (auto [bx, by] : pb) best = std::min(best, std::abs(ax - bx) + std::abs(ay - by));
  return best;
}

bool intersects(const Box& a, const Box& b) {
  return a.x0 <= b.x1 && b.x0 <= a.x1 && a.y0 <= b.y1 && b.y0 <= a.y1;
}

TEST(Geometry, GapExamples) {
  EXPECT_EQ(manhattan_gap({0, 0, 10, 10}, {14, 0, 24, 10}), 4);
  EXPECT_TRUE(rooms_adjacent({0, 0, 10, 10}, {14, 0, 24, 10}));
  EXPECT_EQ(manhattan_gap({0, 0, 10, 10}, {18, 0, 28, 10}), 8);
  EXPECT_FALSE(rooms_adjacent({0, 0, 10, 10}, {18, 0, 28, 10}));
  EXPECT_EQ(manhattan_gap({0, 0, 10, 10}, {5, 5, 20, 20}), 0);
}

TEST(Geometry, GapAgreesWithLatticeSearch) {
  RandomStream rs(3, {});
  auto box = [&] {
    const int x0 = rs.uniform_int(0, 40), y0 = rs.uniform_int(0, 40);
    return Box{x0, y0, x0 + rs.uniform_int(0, 12), y0 + rs.uniform_int(0, 12)};
  };
  for (int t = 0; t < 300; ++t) {
    const Box a = box(), b = box();
    const int g = manhattan_gap(a, b);
    EXPECT_EQ(g, manhattan_gap(b, a));
    EXPECT_GE(g, 0);
    EXPECT_EQ(g == 0, intersects(a, b));
    if (!intersects(a, b)) {
      EXPECT_EQ(g, lattice_gap(a, b)) << t;
    }
  }
}

TEST(Diagram, RejectsMalformed) {
  using R = RoomType;
  EXPECT_THROW(BubbleDiagram({}, {}), ValidationError);
  EXPECT_THROW(BubbleDiagram({R::kKitchen}, {{0, 0}}), ValidationError);
  EXPECT_THROW(BubbleDiagram({R::kKitchen, R::kBedroom}, {{0, 2}}), ValidationError);
  EXPECT_THROW(BubbleDiagram(std::vector<R>(41, R::kBedroom), {}), ValidationError);
  EXPECT_NO_THROW(BubbleDiagram(std::vector<R>(40, R::kBedroom), {}));
}

TEST(Diagram, EdgesAreCanonical) {
  const BubbleDiagram d({RoomType::kKitchen, RoomType::kBedroom, RoomType::kBathroom}, {{2, 0}, {0, 2}, {1, 0}});
  EXPECT_EQ(d.edges(), (std::vector<Edge>{{0, 1}, {0, 2}}));
  EXPECT_TRUE(d.has_edge(2, 0));
  EXPECT_EQ(d.degree(0), 2);
  EXPECT_EQ(d.fully_connected().edges().size(), 3U);
}

TEST(Diagram, PermutationMapsEdges) {
  RandomStream rs(8, {});
  for (int t = 0; t < 20; ++t) {
    const auto d = fixtures::random_diagram(rs, 2, 10);
    const auto perm = fixtures::random_permutation(rs, d.size());
    const auto p = d.permuted(perm);
    for (int i = 0; i < d.size(); ++i) {
      EXPECT_EQ(p.type(perm[static_cast<std::size_t>(i)]), d.type(i));
      for (int j = 0; j < d.size(); ++j)
        if (i != j) {
          EXPECT_EQ(p.has_edge(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]), d.has_edge(i, j));
        }
    }
  }
}

TEST(Json, DiagramRoundTrip) {
  RandomStream rs(13, {});
  for (int t = 0; t < 30; ++t) {
    const auto d = fixtures::random_diagram(rs, 1, 20);
    EXPECT_EQ(diagram_from_json(Json::parse(diagram_to_json(d).dump())), d);
  }
}

TEST(Json, LayoutRoundTrip) {
  const Layout l({RoomType::kBedroom, RoomType::kCloset}, {Box{0, 0, 100, 120}, Box{10, 10, 30, 30}});
  EXPECT_EQ(layout_from_json(Json::parse(layout_to_json(l).dump())), l);
}

TEST(Json, RejectsBadDocuments) {
  EXPECT_THROW(diagram_from_json(Json::parse(R"({"nodes":[{"id":1,"type":0}]})")), ValidationError);
  EXPECT_THROW(diagram_from_json(Json::parse(R"({"nodes":[{"id":0,"type":10}]})")), ValidationError);
  EXPECT_THROW(diagram_from_json(Json::parse(R"({"nodes":[{"id":0,"type":"x"}]})")), ValidationError);
  EXPECT_THROW(diagram_from_json(Json::parse(R"({"nodes":[{"id":0,"type":1}],"edges":[[0]]})")), ValidationError);
  EXPECT_THROW(diagram_from_json(Json::parse(R"([1,2])")), ValidationError);
  EXPECT_THROW(layout_from_json(Json::parse(R"({"rooms":[{"type":0,"box":[0,0,300,10]}]})")), ValidationError);
  EXPECT_THROW(layout_from_json(Json::parse(R"({"canvas":512,"rooms":[]})")), ValidationError);
  EXPECT_THROW(layout_from_json(Json::parse(R"({"rooms":[{"type":0,"box":[5,0,1,10]}]})")), ValidationError);
}

TEST(Random, StreamsAreKeyedAndReproducible) {
  RandomStream a(1, {2, 3}), b(1, {2, 3}), c(1, {3, 2});
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  EXPECT_EQ(room_noise(5, 0, 1, 128), room_noise(5, 0, 1, 128));
  EXPECT_NE(room_noise(5, 0, 1, 128), room_noise(5, 0, 2, 128));
}

TEST(Random, NormalMoments) {
  RandomStream rs(42, {});
  const auto v = rs.normal_vector(200000);
  double m = 0, s = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double x : v) s += (x - m) * (x - m);
  s /= static_cast<double>(v.size() - 1);
  EXPECT_NEAR(m, 0.0, 0.01);
  EXPECT_NEAR(s, 1.0, 0.01);
}

TEST(Random, UniformIntCoversInclusiveRange) {
  RandomStream rs(9, {});
  std::set<int> seen;
  for (int i = 0; i < 1000; ++i) {
    const int x = rs.uniform_int(-2, 2);
    ASSERT_GE(x, -2);
    ASSERT_LE(x, 2);
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 5U);
}

}  // namespace
}  // namespace housegan
