#include <gtest/gtest.h>

#include <set>

#include <Eigen/Dense>

#include "housegan/metrics/evaluation.hpp"
#include "support/fixtures.hpp"
#include "support/ged_oracle.hpp"

namespace housegan {
namespace {

using fixtures::exhaustive_ged;
using fixtures::random_labeled_graph;

// ---------------------------------------------------------------- GED

TEST(Ged, IdenticalGraphsAreZero) {
  RandomStream rs(1, {});
  for (int t = 0; t < 50; ++t) {
    const auto d = fixtures::random_diagram(rs, 1, 12);
    const auto r = ged(d, d);
    EXPECT_EQ(r.distance, 0);
    EXPECT_TRUE(r.exact);
  }
}

TEST(Ged, AddingOneConnectedNodeCostsTwo) {
  const BubbleDiagram g({RoomType::kLivingRoom, RoomType::kKitchen, RoomType::kBedroom}, {{0, 1}, {0, 2}});
  const BubbleDiagram h({RoomType::kLivingRoom, RoomType::kKitchen, RoomType::kBedroom, RoomType::kBathroom},
                        {{0, 1}, {0, 2}, {2, 3}});
  EXPECT_EQ(exhaustive_ged(LabeledGraph::from(g), LabeledGraph::from(h)), 2);
  EXPECT_EQ(ged(g, h).distance, 2);
}

TEST(Ged, TriangleVersusPathIsOneEdge) {
  const std::vector<RoomType> t(3, RoomType::kBedroom);
  const BubbleDiagram tri(t, {{0, 1}, {1, 2}, {0, 2}});
  const BubbleDiagram path(t, {{0, 1}, {1, 2}});
  EXPECT_EQ(exhaustive_ged(LabeledGraph::from(tri), LabeledGraph::from(path)), 1);
  EXPECT_EQ(ged(tri, path).distance, 1);
}

TEST(Ged, EmptyGraphs) {
  const LabeledGraph empty;
  LabeledGraph two({1, 2});
  two.connect(0, 1);
  EXPECT_EQ(ged(empty, empty).distance, 0);
  EXPECT_EQ(ged(empty, two).distance, 3);
  EXPECT_EQ(ged(two, empty).distance, 3);
}

TEST(Ged, MatchesExhaustiveOracleOnSmallPairs) {
  RandomStream rs(2024, {});
  for (int t = 0; t < 200; ++t) {
    const auto a = random_labeled_graph(rs, 0, 4);
    const auto b = random_labeled_graph(rs, 0, 4);
    const auto r = ged(a, b);
    ASSERT_TRUE(r.exact);
    ASSERT_EQ(r.distance, exhaustive_ged(a, b)) << "pair " << t;
  }
}

TEST(Ged, MatchesOracleWithoutLabels) {
  RandomStream rs(77, {});
  GedConfig cfg;
  cfg.ignore_node_labels = true;
  for (int t = 0; t < 100; ++t) {
    const auto a = random_labeled_graph(rs, 1, 5, 4);
    const auto b = random_labeled_graph(rs, 1, 5, 4);
    ASSERT_EQ(ged(a, b, cfg).distance, exhaustive_ged(a, b, true));
  }
}

TEST(Ged, MetricAxiomsOnFiveNodeGraphs) {
  RandomStream rs(99, {});
  for (int t = 0; t < 60; ++t) {
    const auto a = random_labeled_graph(rs, 1, 5);
    const auto b = random_labeled_graph(rs, 1, 5);
    const auto c = random_labeled_graph(rs, 1, 5);
    const double ab = ged(a, b).distance, ba = ged(b, a).distance;
    const double bc = ged(b, c).distance, ac = ged(a, c).distance;
    EXPECT_EQ(ged(a, a).distance, 0);
    EXPECT_EQ(ab, ba);
    EXPECT_LE(ac, ab + bc);
    EXPECT_EQ(ab, exhaustive_ged(a, b));
  }
}

TEST(Ged, LargeDistanceIsCappedAtTheBound) {
  LabeledGraph a(std::vector<int>(12, 0));
  LabeledGraph b(std::vector<int>(12, 1));
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) a.connect(i, j);
  GedConfig cfg;
  cfg.upper_bound = 10;
  const auto r = ged(a, b, cfg);
  EXPECT_EQ(r.distance, 10);
  EXPECT_TRUE(r.exceeded_bound);
  EXPECT_FALSE(r.exact);
}

TEST(Ged, TimeoutReturnsAnUpperBound) {
  RandomStream rs(5, {});
  const auto a = random_labeled_graph(rs, 16, 16, 2, 0.5);
  const auto b = random_labeled_graph(rs, 16, 16, 2, 0.5);
  GedConfig cfg;
  cfg.timeout_seconds = 1e-6;
  const auto r = ged(a, b, cfg);
  EXPECT_FALSE(r.exact);
  EXPECT_GT(r.distance, 0);
  EXPECT_LE(r.distance, cfg.upper_bound);
}

TEST(Ged, RejectsBadConfig) {
  GedConfig cfg;
  cfg.upper_bound = 0;
  EXPECT_THROW(ged(LabeledGraph{}, LabeledGraph{}, cfg), ValidationError);
}

// ---------------------------------------------------------- rect fit

// Independent bounding-box oracle from the positive pixel list.
GridBox oracle_extent(const RoomMask& m) {
  std::vector<int> rows, cols;
  for (int r = 0; r < m.resolution(); ++r)
    for (int c = 0; c < m.resolution(); ++c)
      if (m.at(r, c) > 0.0) {
        rows.push_back(r);
        cols.push_back(c);
      }
  if (rows.empty()) return GridBox{};
  return {*std::min_element(rows.begin(), rows.end()), *std::min_element(cols.begin(), cols.end()),
          *std::max_element(rows.begin(), rows.end()), *std::max_element(cols.begin(), cols.end())};
}

bool covers_all_positive(const RoomMask& m, const GridBox& g) {
  for (int r = 0; r < m.resolution(); ++r)
    for (int c = 0; c < m.resolution(); ++c)
      if (m.at(r, c) > 0.0 && (r < g.row0 || r > g.row1 || c < g.col0 || c > g.col1)) return false;
  return true;
}

RoomMask random_mask(RandomStream& rs) {
  RoomMask m(kMaskResolution, -1.0);
  switch (rs.uniform_int(0, 3)) {
    case 0:  // sparse points
      for (int k = rs.uniform_int(0, 6); k > 0; --k)
        m.at(rs.uniform_int(0, 31), rs.uniform_int(0, 31)) = rs.uniform(1e-6, 1.0);
      break;
    case 1:  // dense noise
      for (double& v : m.values()) v = rs.uniform(-1.0, 1.0);
      break;
    case 2: {  // blob with ragged edges and exact zeros
      const int r0 = rs.uniform_int(0, 31), c0 = rs.uniform_int(0, 31);
      const int r1 = rs.uniform_int(r0, 31), c1 = rs.uniform_int(c0, 31);
      for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) m.at(r, c) = rs.uniform() < 0.7 ? 0.5 : 0.0;
      break;
    }
    default:  // nothing above zero
      for (double& v : m.values()) v = -rs.uniform();
      break;
  }
  return m;
}

TEST(RectFit, TwoPixelExample) {
  RoomMask m(32, -1.0);
  m.at(5, 5) = 0.3;
  m.at(10, 12) = 0.9;
  const auto fit = fit_rectangles({RoomType::kKitchen}, {m});
  EXPECT_FALSE(fit.degenerate[0]);
  EXPECT_EQ(fit.layout.box(0), (Box{40, 40, 104, 88}));
}

TEST(RectFit, FullAndEmptyMasks) {
  const auto fit = fit_rectangles({RoomType::kKitchen, RoomType::kBedroom}, {RoomMask(32, 1.0), RoomMask(32, 0.0)});
  EXPECT_EQ(fit.layout.box(0), (Box{0, 0, 256, 256}));
  EXPECT_TRUE(fit.degenerate[1]);
  EXPECT_EQ(fit.layout.box(1), kDegenerateBox);
  EXPECT_EQ(fit.degenerate_count(), 1);
  EXPECT_EQ(fit.valid_rooms().size(), 1);
}

TEST(RectFit, MinimalCoveringBoxOnRandomMasks) {
  RandomStream rs(31337, {});
  int degenerate = 0;
  for (int t = 0; t < 1000; ++t) {
    const RoomMask m = random_mask(rs);
    const GridBox g = positive_extent(m.values(), m.resolution());
    const GridBox o = oracle_extent(m);
    ASSERT_EQ(g, o);
    if (g.empty()) {
      ++degenerate;
      ASSERT_TRUE(fit_rectangles({RoomType::kBalcony}, {m}).degenerate[0]);
      continue;
    }
    ASSERT_TRUE(covers_all_positive(m, g));
    // Pulling in any one side uncovers a positive pixel, so nothing smaller works.
    for (int side = 0; side < 4; ++side) {
      GridBox s = g;
      (side == 0 ? s.row0 : side == 1 ? s.col0 : side == 2 ? s.row1 : s.col1) += side < 2 ? 1 : -1;
      ASSERT_FALSE(!s.empty() && covers_all_positive(m, s)) << "mask " << t << " side " << side;
    }
    const Box b = fit_rectangles({RoomType::kBalcony}, {m}).layout.box(0);
    EXPECT_EQ(b, (Box{g.col0 * 8, g.row0 * 8, (g.col1 + 1) * 8, (g.row1 + 1) * 8}));
  }
  EXPECT_GT(degenerate, 100);
}

TEST(RectFit, GroundTruthMasksRecoverGridAlignedBoxes) {
  const Layout l({RoomType::kLivingRoom, RoomType::kKitchen}, {Box{0, 0, 128, 256}, Box{128, 0, 256, 64}});
  const auto fit = fit_rectangles(l.types(), masks_from_layout(l));
  EXPECT_EQ(fit.layout, l);
}

// ----------------------------------------------------------- Fréchet

GaussianStats stats(std::vector<double> mean, Eigen::MatrixXd cov) {
  return {Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size())), std::move(cov)};
}

Eigen::MatrixXd random_spd(RandomStream& rs, int d) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rs.normal();
  return a * a.transpose() / d + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

TEST(Frechet, IdenticalStatsAreZero) {
  RandomStream rs(4, {});
  for (int d : {1, 3, 16, 64}) {
    GaussianStats s{Eigen::VectorXd::Random(d), random_spd(rs, d)};
    EXPECT_LT(frechet_distance(s, s), 1e-8) << d;
  }
}

TEST(Frechet, MeanShiftOnly) {
  RandomStream rs(8, {});
  const Eigen::MatrixXd cov = random_spd(rs, 8);
  Eigen::VectorXd m1(8), d(8);
  for (int i = 0; i < 8; ++i) {
    m1(i) = rs.normal();
    d(i) = rs.normal() * 3;
  }
  const double fd = frechet_distance({m1, cov}, {m1 + d, cov});
  EXPECT_NEAR(fd, d.squaredNorm(), 1e-9 * d.squaredNorm());
}

TEST(Frechet, ScalarClosedForm) {
  const auto a = stats({0.0}, Eigen::MatrixXd::Constant(1, 1, 1.0));
  const auto b = stats({1.0}, Eigen::MatrixXd::Constant(1, 1, 4.0));
  // (mu1 - mu2)^2 + (sigma1 - sigma2)^2
  EXPECT_NEAR(frechet_distance(a, b), 1.0 + (1.0 - 2.0) * (1.0 - 2.0), 1e-12);
}

TEST(Frechet, SymmetricNonNegativeAndRotationInvariant) {
  RandomStream rs(12, {});
  for (int t = 0; t < 10; ++t) {
    const int d = 6;
    GaussianStats a{Eigen::VectorXd::Random(d), random_spd(rs, d)};
    GaussianStats b{Eigen::VectorXd::Random(d), random_spd(rs, d)};
    const double ab = frechet_distance(a, b);
    EXPECT_GE(ab, 0);
    EXPECT_NEAR(ab, frechet_distance(b, a), 1e-9 * std::max(1.0, ab));
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = rs.normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    GaussianStats ra{q * a.mean, q * a.cov * q.transpose()};
    GaussianStats rb{q * b.mean, q * b.cov * q.transpose()};
    EXPECT_NEAR(frechet_distance(ra, rb), ab, 1e-9 * std::max(1.0, ab));
  }
}

TEST(Frechet, DiagonalCovariancesMatchClosedForm) {
  // Commuting covariances: sum of (sqrt(a_i) - sqrt(b_i))^2.
  Eigen::VectorXd va(3), vb(3);
  va << 1.0, 4.0, 9.0;
  vb << 4.0, 1.0, 0.25;
  const GaussianStats a{Eigen::VectorXd::Zero(3), va.asDiagonal()};
  const GaussianStats b{Eigen::VectorXd::Zero(3), vb.asDiagonal()};
  EXPECT_NEAR(frechet_distance(a, b), 1.0 + 1.0 + 6.25, 1e-12);
}

TEST(Frechet, SampleStatistics) {
  const auto s = gaussian_stats({{1, 2}, {3, 6}, {5, 10}});
  EXPECT_DOUBLE_EQ(s.mean(0), 3);
  EXPECT_DOUBLE_EQ(s.cov(0, 0), 4);
  EXPECT_DOUBLE_EQ(s.cov(0, 1), 8);
  EXPECT_DOUBLE_EQ(s.cov(1, 1), 16);
  EXPECT_TRUE(gaussian_stats({{1, 2}}).cov.isZero());
  EXPECT_THROW(gaussian_stats({}), ValidationError);
}

TEST(Frechet, DimensionMismatchThrows) {
  const auto a = stats({0.0}, Eigen::MatrixXd::Identity(1, 1));
  const auto b = stats({0.0, 0.0}, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(frechet_distance(a, b), ValidationError);
}

// ------------------------------------------------------ compatibility

TEST(Compatibility, GroundTruthCorpusRoundTripsToZero) {
  SynthConfig cfg;
  cfg.samples_per_group = {200, 200, 200, 200, 200};
  const Corpus corpus = synthesize_corpus(cfg, 11);
  ASSERT_EQ(corpus.samples.size(), 1000U);
  for (const Sample& s : corpus.samples) {
    const FittedLayout f{s.layout, std::vector<bool>(static_cast<std::size_t>(s.layout.size()), false)};
    const auto r = compatibility(s.diagram, f);
    ASSERT_EQ(r.distance, 0) << s.id;
    ASSERT_TRUE(r.exact) << s.id;
  }
}

TEST(Compatibility, BreakingOneAdjacencyCostsOne) {
  // Kitchen touches living room only; move it to the far corner.
  const Layout l({RoomType::kLivingRoom, RoomType::kKitchen, RoomType::kBedroom},
                 {Box{0, 0, 100, 100}, Box{100, 0, 160, 60}, Box{0, 100, 100, 200}});
  const BubbleDiagram d = derive_diagram(l);
  ASSERT_TRUE(d.has_edge(0, 1));
  ASSERT_FALSE(d.has_edge(1, 2));
  const Layout moved({RoomType::kLivingRoom, RoomType::kKitchen, RoomType::kBedroom},
                     {Box{0, 0, 100, 100}, Box{200, 200, 256, 256}, Box{0, 100, 100, 200}});
  const FittedLayout f{moved, {false, false, false}};
  EXPECT_EQ(compatibility(d, f).distance, 1);
  EXPECT_EQ(exhaustive_ged(LabeledGraph::from(d), LabeledGraph::from(moved)), 1);
}

TEST(Compatibility, DegenerateRoomIsADeletedNode) {
  const Layout l({RoomType::kLivingRoom, RoomType::kKitchen}, {Box{0, 0, 100, 100}, Box{100, 0, 160, 60}});
  const BubbleDiagram d = derive_diagram(l);
  const FittedLayout f{Layout(l.types(), {l.box(0), kDegenerateBox}), {false, true}};
  EXPECT_EQ(compatibility(d, f).distance, 2);
}

// ---------------------------------------------------------- protocol

TEST(Protocol, Defaults) {
  EXPECT_EQ(EvalProtocol::diversity().num_diagrams, 5000);
  EXPECT_EQ(EvalProtocol::diversity().variations_per_diagram, 10);
  for (Group g : kAllGroups) {
    const auto p = EvalProtocol::compatibility(g);
    EXPECT_EQ(p.variations_per_diagram, 1);
    const bool large = g == Group::k10to12 || g == Group::k13plus;
    EXPECT_EQ(p.num_diagrams, large ? 1000 : 5000);
  }
  EXPECT_EQ(GedConfig{}.upper_bound, 40);
  EvalProtocol bad;
  bad.variations_per_diagram = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Protocol, SelectionIsDeterministicAndWithoutReplacement) {
  const Corpus corpus = synthesize_corpus(SynthConfig{}, 3);
  const auto pool = corpus.in_group(Group::k4to6);
  const auto a = select_diagrams(pool, 7, 42);
  const auto b = select_diagrams(pool, 7, 42);
  EXPECT_EQ(a, b);
  std::set<const Sample*> unique(a.begin(), a.end());
  EXPECT_EQ(unique.size(), 7U);
  EXPECT_EQ(select_diagrams(pool, 1000, 42), pool);
}

// ------------------------------------------------------------- FID

TEST(Diversity, GroundTruthAgainstItselfIsZero) {
  const Corpus corpus = synthesize_corpus(SynthConfig{}, 5);
  const auto pool = corpus.in_group(Group::k7to9);
  EvalOptions opt;
  opt.protocol = {1000, 1, 0};
  for (const auto& id : feature_extractor_ids()) {
    opt.feature_extractor = id;
    const LayoutSource truth = [](const Sample& s, std::size_t, int) {
      return FittedLayout{s.layout, std::vector<bool>(static_cast<std::size_t>(s.layout.size()), false)};
    };
    EXPECT_LT(diversity_score(pool, truth, opt).score, 1e-8) << id;
  }
}

TEST(Diversity, ModeCollapseScoresWorse) {
  const Corpus corpus = synthesize_corpus(SynthConfig{}, 6);
  const auto pool = corpus.in_group(Group::k4to6);
  EvalOptions opt;
  opt.protocol = {1000, 3, 0};
  const LayoutSource truth = [](const Sample& s, std::size_t, int) {
    return FittedLayout{s.layout, std::vector<bool>(static_cast<std::size_t>(s.layout.size()), false)};
  };
  const Layout constant = pool.front()->layout;
  const LayoutSource collapsed = [&](const Sample&, std::size_t, int) {
    return FittedLayout{constant, std::vector<bool>(static_cast<std::size_t>(constant.size()), false)};
  };
  for (const auto& id : feature_extractor_ids()) {
    opt.feature_extractor = id;
    const double self = diversity_score(pool, truth, opt).score;
    const double bad = diversity_score(pool, collapsed, opt).score;
    EXPECT_GT(bad, self + 1e-3) << id;
  }
}

TEST(Features, DimensionsAndSkip) {
  const Layout l({RoomType::kLivingRoom, RoomType::kKitchen}, {Box{0, 0, 128, 256}, Box{128, 0, 256, 128}});
  TypeHistogramFeatures hist;
  const auto h = hist.extract(l, {});
  ASSERT_EQ(h.size(), 40U);
  const auto lr = static_cast<std::size_t>(code(RoomType::kLivingRoom));
  EXPECT_DOUBLE_EQ(h[4 * lr], 1.0);
  EXPECT_DOUBLE_EQ(h[4 * lr + 1], 0.5);
  EXPECT_DOUBLE_EQ(h[4 * lr + 2], 0.25);
  EXPECT_DOUBLE_EQ(h[4 * lr + 3], 0.5);
  const auto skipped = hist.extract(l, {false, true});
  EXPECT_DOUBLE_EQ(skipped[4 * static_cast<std::size_t>(code(RoomType::kKitchen))], 0.0);

  PixelProjectionFeatures px;
  EXPECT_EQ(px.extract(l, {}).size(), 64U);
  EXPECT_EQ(px.extract(l, {}), PixelProjectionFeatures().extract(l, {}));
  EXPECT_NE(px.extract(l, {}), px.extract(l, {false, true}));
  EXPECT_THROW(make_feature_extractor("inception"), ValidationError);
}

// ------------------------------------------------------------ report

TEST(Report, CompatReportRecordsProtocol) {
  const Corpus corpus = synthesize_corpus(SynthConfig{}, 9);
  EvalRequest req;
  req.workers = 2;
  const LayoutSource truth = [](const Sample& s, std::size_t, int) {
    return FittedLayout{s.layout, std::vector<bool>(static_cast<std::size_t>(s.layout.size()), false)};
  };
  const Json r = evaluation_report(Metric::kCompat, {Group::k10to12}, corpus, truth, req, Json::object());
  EXPECT_EQ(r["metric"], "compat");
  EXPECT_EQ(r["protocol"]["num_diagrams"], 1000);
  EXPECT_EQ(r["protocol"]["variations_per_diagram"], 1);
  EXPECT_EQ(r["protocol"]["ged_upper_bound"], 40);
  EXPECT_EQ(r["per_group"]["10-12"]["evaluated_diagrams"], 20);
  EXPECT_DOUBLE_EQ(r["score"].get<double>(), 0.0);
  EXPECT_TRUE(r["all_exact"].get<bool>());
  EXPECT_TRUE(r["feature_extractor"].is_null());

  const Json mixed = evaluation_report(Metric::kCompat, {Group::k1to3, Group::k13plus}, corpus, truth, req, {});
  EXPECT_EQ(mixed["protocol"]["num_diagrams"], "per group");
  EXPECT_EQ(mixed["per_group"]["1-3"]["num_diagrams"], 5000);
  EXPECT_EQ(mixed["per_group"]["13+"]["num_diagrams"], 1000);

  req.num_diagrams = 5;
  const Json fid = evaluation_report(Metric::kFid, {Group::k4to6}, corpus, truth, req, {});
  EXPECT_EQ(fid["protocol"]["num_diagrams"], 5);
  EXPECT_EQ(fid["protocol"]["variations_per_diagram"], 10);
  EXPECT_EQ(fid["feature_extractor"], "pixels-rp64");
  EXPECT_EQ(fid["per_group"]["4-6"]["layouts"], 50);
}

TEST(Report, GeneratorSourceIsDeterministic) {
  ModelConfig cfg;
  cfg.arch = Architecture::tiny();
  const auto params = make_params(cfg, 3);
  const LayoutGenerator gen(cfg, params.generator);
  const Corpus corpus = synthesize_corpus(SynthConfig{}, 2);
  const auto src = generator_source(gen, 17);
  const Sample& s = *corpus.in_group(Group::k4to6).front();
  const auto a = src(s, 0, 0);
  const auto b = src(s, 0, 0);
  EXPECT_EQ(a.layout, b.layout);
  EXPECT_EQ(a.layout.size(), s.diagram.size());
}

}  // namespace
}  // namespace housegan
