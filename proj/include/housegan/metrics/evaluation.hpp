#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "housegan/core/json_io.hpp"
#include "housegan/core/thread_pool.hpp"
#include "housegan/metrics/features.hpp"
#include "housegan/metrics/frechet.hpp"
#include "housegan/metrics/ged.hpp"
#include "housegan/metrics/rect_fit.hpp"
#include "housegan/relnet/checkpoint.hpp"

namespace housegan {

enum class Metric { kCompat, kFid };

inline std::string_view metric_name(Metric m) { return m == Metric::kCompat ? "compat" : "fid"; }

inline Metric parse_metric(std::string_view s) {
  if (s == "compat") return Metric::kCompat;
  if (s == "fid") return Metric::kFid;
  throw ValidationError("unknown metric: " + std::string(s));
}

/// How many diagrams are drawn and how many layouts each one gets.
struct EvalProtocol {
  int num_diagrams = 5000;
  int variations_per_diagram = 10;
  std::uint64_t seed = 0;

  /// 5000 diagrams, 10 variations each.
  static EvalProtocol diversity() { return {5000, 10, 0}; }

  /// One layout per diagram; the large groups use 1000 diagrams because the
  /// edit distance gets expensive.
  static EvalProtocol compatibility(Group g) {
    const bool large = g == Group::k10to12 || g == Group::k13plus;
    return {large ? 1000 : 5000, 1, 0};
  }

  static EvalProtocol defaults(Metric m, Group g) {
    return m == Metric::kFid ? diversity() : compatibility(g);
  }

  void validate() const {
    if (num_diagrams <= 0) throw ValidationError("num_diagrams must be positive");
    if (variations_per_diagram <= 0) throw ValidationError("variations_per_diagram must be positive");
  }
};

/// GED between the input diagram and the diagram re-derived from the fitted
/// layout. Degenerate rooms are absent from the derived graph, so each one
/// costs a node deletion plus its edges.
inline GedResult compatibility(const BubbleDiagram& input, const FittedLayout& output, const GedConfig& config = {}) {
  return ged(LabeledGraph::from(input), LabeledGraph::from(output.valid_rooms()), config);
}

/// Noise for variation `variation` of the `index`-th evaluated diagram.
inline std::vector<NoiseVector> evaluation_noise(std::uint64_t seed, std::size_t index, int variation, int rooms,
                                                 int dim) {
  std::vector<NoiseVector> out;
  out.reserve(static_cast<std::size_t>(rooms));
  for (int r = 0; r < rooms; ++r) {
    RandomStream rs(seed, {static_cast<std::uint64_t>(StreamDomain::kEvaluation), index,
                           static_cast<std::uint64_t>(variation), static_cast<std::uint64_t>(r)});
    out.push_back(rs.normal_vector(dim));
  }
  return out;
}

/// Float inference wrapper around a checkpoint: diagram + noise to masks to
/// fitted boxes.
class LayoutGenerator {
 public:
  LayoutGenerator(const ModelConfig& config, const nn::ParamSet<double>& generator)
      : model_(config), params_(generator.cast<float>()) {}
  explicit LayoutGenerator(const Checkpoint& ck) : LayoutGenerator(ck.config, ck.params.generator) {}

  const ModelConfig& config() const { return model_.config(); }
  int noise_dim() const { return model_.config().arch.noise_dim; }

  std::vector<RoomMask> masks(const BubbleDiagram& d, std::span<const NoiseVector> noise) const {
    const auto pass = model_.generate(params_, d, noise);
    const int m = pass.masks.dim(2);
    std::vector<RoomMask> out;
    for (int r = 0; r < d.size(); ++r) {
      const auto node = pass.masks.node(r);
      out.emplace_back(m, std::vector<double>(node.begin(), node.end()));
    }
    return out;
  }

  FittedLayout layout(const BubbleDiagram& d, std::span<const NoiseVector> noise) const {
    return fit_rectangles(d.types(), masks(d, noise));
  }

 private:
  RelationalGan<float> model_;
  nn::ParamSet<float> params_;
};

/// Produces the layout for variation v of the i-th evaluated sample.
using LayoutSource = std::function<FittedLayout(const Sample&, std::size_t index, int variation)>;

inline LayoutSource generator_source(const LayoutGenerator& gen, std::uint64_t seed) {
  return [&gen, seed](const Sample& s, std::size_t index, int variation) {
    const auto noise = evaluation_noise(seed, index, variation, s.diagram.size(), gen.noise_dim());
    return gen.layout(s.diagram, noise);
  };
}

/// Up to `count` samples of the pool without replacement. The whole pool, in
/// order, when it is not larger than `count`.
inline std::vector<const Sample*> select_diagrams(std::vector<const Sample*> pool, int count, std::uint64_t seed) {
  if (static_cast<int>(pool.size()) <= count) return pool;
  RandomStream rs(seed, {static_cast<std::uint64_t>(StreamDomain::kEvaluation), 0xd1a9});
  for (int i = static_cast<int>(pool.size()) - 1; i > 0; --i) {
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(rs.uniform_int(0, i))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

struct EvalOptions {
  EvalProtocol protocol;
  GedConfig ged;
  std::string feature_extractor = "pixels-rp64";
  std::size_t workers = 0;
};

/// Command-line style settings: unset counts fall back to the per-metric,
/// per-group protocol defaults.
struct EvalRequest {
  std::optional<int> num_diagrams;
  std::optional<int> variations_per_diagram;
  std::uint64_t seed = 0;
  GedConfig ged;
  std::string feature_extractor = "pixels-rp64";
  std::size_t workers = 0;

  EvalOptions resolve(Metric m, Group g) const {
    EvalOptions o;
    o.protocol = EvalProtocol::defaults(m, g);
    if (num_diagrams) o.protocol.num_diagrams = *num_diagrams;
    if (variations_per_diagram) o.protocol.variations_per_diagram = *variations_per_diagram;
    o.protocol.seed = seed;
    o.ged = ged;
    o.feature_extractor = feature_extractor;
    o.workers = workers;
    return o;
  }
};

struct CompatSummary {
  double score = 0;
  int evaluated_diagrams = 0;
  int layouts = 0;
  int exact = 0;
  int inexact = 0;
  int timed_out = 0;
  int exceeded_bound = 0;
  int degenerate_rooms = 0;
};

/// Mean compatibility over X layouts for each selected diagram. The edit
/// distances run on a bounded pool; results are combined in sample order.
inline CompatSummary compatibility_score(const std::vector<const Sample*>& pool, const LayoutSource& source,
                                         const EvalOptions& opt) {
  opt.protocol.validate();
  opt.ged.validate();
  const auto chosen = select_diagrams(pool, opt.protocol.num_diagrams, opt.protocol.seed);
  const int x = opt.protocol.variations_per_diagram;
  struct Job {
    const Sample* sample;
    FittedLayout layout;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    for (int v = 0; v < x; ++v) jobs.push_back({chosen[i], source(*chosen[i], i, v)});
  }
  ThreadPool pool_exec(opt.workers);
  const auto results = parallel_map(pool_exec, jobs.size(), [&](std::size_t k) {
    return compatibility(jobs[k].sample->diagram, jobs[k].layout, opt.ged);
  });

  CompatSummary s;
  s.evaluated_diagrams = static_cast<int>(chosen.size());
  s.layouts = static_cast<int>(jobs.size());
  double total = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    total += results[k].distance;
    (results[k].exact ? s.exact : s.inexact) += 1;
    s.timed_out += results[k].timed_out ? 1 : 0;
    s.exceeded_bound += results[k].exceeded_bound ? 1 : 0;
    s.degenerate_rooms += jobs[k].layout.degenerate_count();
  }
  s.score = jobs.empty() ? 0.0 : total / static_cast<double>(jobs.size());
  return s;
}

struct FidSummary {
  double score = 0;
  int evaluated_diagrams = 0;
  int layouts = 0;
  int real_layouts = 0;
  int degenerate_rooms = 0;
};

/// Features of every ground-truth layout of the pool.
inline GaussianStats real_feature_stats(const std::vector<const Sample*>& pool, const FeatureExtractor& fx) {
  std::vector<std::vector<double>> feats;
  for (const Sample* s : pool) feats.push_back(fx.extract(s->layout, {}));
  return gaussian_stats(feats);
}

/// Fréchet distance between X generated layouts per selected diagram and the
/// full ground-truth pool.
inline FidSummary diversity_score(const std::vector<const Sample*>& pool, const LayoutSource& source,
                                  const EvalOptions& opt) {
  opt.protocol.validate();
  if (pool.empty()) throw ValidationError("no ground-truth samples to compare against");
  const auto fx = make_feature_extractor(opt.feature_extractor);
  const auto chosen = select_diagrams(pool, opt.protocol.num_diagrams, opt.protocol.seed);
  FidSummary s;
  std::vector<std::vector<double>> feats;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    for (int v = 0; v < opt.protocol.variations_per_diagram; ++v) {
      const FittedLayout f = source(*chosen[i], i, v);
      s.degenerate_rooms += f.degenerate_count();
      feats.push_back(fx->extract(f.layout, f.degenerate));
    }
  }
  s.evaluated_diagrams = static_cast<int>(chosen.size());
  s.layouts = static_cast<int>(feats.size());
  s.real_layouts = static_cast<int>(pool.size());
  s.score = frechet_distance(gaussian_stats(feats), real_feature_stats(pool, *fx));
  return s;
}

/// Evaluation of one checkpoint on one or more groups, as a report document.
/// Protocol counts are recorded per group and, when every group agrees,
/// once at the top level.
inline Json evaluation_report(Metric metric, const std::vector<Group>& groups, const Corpus& corpus,
                              const LayoutSource& source, const EvalRequest& request, const Json& checkpoint_info) {
  Json per_group = Json::object();
  double weighted = 0;
  int weight = 0;
  bool all_exact = true;
  std::set<int> diagram_counts, variation_counts;
  for (Group g : groups) {
    const EvalOptions opt = request.resolve(metric, g);
    diagram_counts.insert(opt.protocol.num_diagrams);
    variation_counts.insert(opt.protocol.variations_per_diagram);
    const auto pool = corpus.in_group(g);
    const std::string name(group_name(g));
    Json entry = {{"num_diagrams", opt.protocol.num_diagrams},
                  {"variations_per_diagram", opt.protocol.variations_per_diagram}};
    if (pool.empty()) {
      entry["score"] = nullptr;
      entry["evaluated_diagrams"] = 0;
      per_group[name] = entry;
      continue;
    }
    if (metric == Metric::kCompat) {
      const CompatSummary s = compatibility_score(pool, source, opt);
      entry["score"] = s.score;
      entry["evaluated_diagrams"] = s.evaluated_diagrams;
      entry["layouts"] = s.layouts;
      entry["exact"] = s.exact;
      entry["inexact"] = s.inexact;
      entry["timed_out"] = s.timed_out;
      entry["exceeded_bound"] = s.exceeded_bound;
      entry["degenerate_rooms"] = s.degenerate_rooms;
      all_exact = all_exact && s.inexact == 0;
      weighted += s.score * s.layouts;
      weight += s.layouts;
    } else {
      const FidSummary s = diversity_score(pool, source, opt);
      entry["score"] = s.score;
      entry["evaluated_diagrams"] = s.evaluated_diagrams;
      entry["layouts"] = s.layouts;
      entry["real_layouts"] = s.real_layouts;
      entry["degenerate_rooms"] = s.degenerate_rooms;
      weighted += s.score * s.layouts;
      weight += s.layouts;
    }
    per_group[name] = entry;
  }

  Json report;
  report["metric"] = metric_name(metric);
  Json group_list = Json::array();
  for (Group g : groups) group_list.push_back(group_name(g));
  report["groups"] = group_list;
  report["checkpoint"] = checkpoint_info;
  Json protocol = Json::object();
  protocol["num_diagrams"] = diagram_counts.size() == 1 ? Json(*diagram_counts.begin()) : Json("per group");
  protocol["variations_per_diagram"] =
      variation_counts.size() == 1 ? Json(*variation_counts.begin()) : Json("per group");
  protocol["seed"] = request.seed;
  if (metric == Metric::kCompat) {
    protocol["ged_upper_bound"] = request.ged.upper_bound;
    protocol["ged_timeout_seconds"] = request.ged.timeout_seconds;
    protocol["ged_cost_model"] = "unit";
    protocol["ignore_node_labels"] = request.ged.ignore_node_labels;
    protocol["degenerate_rooms"] = "deleted nodes";
  } else {
    protocol["render_resolution"] = PixelProjectionFeatures::kResolution;
  }
  report["protocol"] = protocol;
  report["feature_extractor"] = metric == Metric::kFid ? Json(request.feature_extractor) : Json(nullptr);
  if (metric == Metric::kFid) {
    report["note"] = "Frechet distance over " + request.feature_extractor +
                     " features, not Inception activations; compare only within this feature space";
  }
  report["per_group"] = per_group;
  // Layout-weighted mean over the evaluated groups.
  report["score"] = weight > 0 ? Json(weighted / weight) : Json(nullptr);
  if (metric == Metric::kCompat) report["all_exact"] = all_exact;
  return report;
}

}  // namespace housegan
