#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "housegan/core/random.hpp"
#include "housegan/nn/sequential.hpp"
#include "housegan/relnet/architecture.hpp"

namespace housegan {

using nn::NodeGraph;
using nn::ParamSet;
using nn::Sequential;
using nn::Tensor;
using nn::Trace;

/// (architecture-table row, per-node output shape such as "8x8x16").
using ShapeRow = std::pair<std::string, std::string>;

template <typename T>
struct GeneratorPass {
  NodeGraph graph;
  Trace<T> trace;
  /// [rooms, 1, M, M]
  Tensor<T> masks;
};

template <typename T>
struct CriticPass {
  NodeGraph graph;
  Trace<T> cond_trace;
  Trace<T> mask_trace;
  Trace<T> body_trace;
  int rooms = 0;
  T score{};
};

namespace detail {

template <typename T>
void add_conv_mpn(Sequential<T>& s, const std::string& name, int channels) {
  s.graph_pool(nn::PoolMode::kSum)
      .conv(name + ".conv_1", 3 * channels, channels, 3, 1, 1).leaky_relu()
      .conv(name + ".conv_2", channels, channels, 3, 1, 1).leaky_relu()
      .conv(name + ".conv_3", channels, channels, 3, 1, 1).leaky_relu()
      .mark(name);
}

// One round: [h ; mean over connected ; mean over non-connected] -> MLP.
template <typename T>
void add_gcn(Sequential<T>& s, const std::string& name, int dim, int hidden, int rounds) {
  for (int r = 1; r <= rounds; ++r) {
    const std::string round = name + ".round_" + std::to_string(r);
    s.graph_pool(nn::PoolMode::kMean)
        .linear(round + ".linear_1", 3 * dim, hidden).leaky_relu()
        .linear(round + ".linear_2", hidden, dim).leaky_relu();
  }
  s.mark(name);
}

// Shared decoder tail: two upsamplings (with optional Conv-MPN) then the
// three-layer mask head.
template <typename T>
void add_decoder(Sequential<T>& s, const Architecture& a, bool relational, int out_channels) {
  const int c = a.channels;
  for (int k = 1; k <= 2; ++k) {
    if (relational) add_conv_mpn(s, "conv_mpn_" + std::to_string(k), c);
    s.conv_transpose("upsample_" + std::to_string(k), c, c, 4, 2, 1).leaky_relu().mark("upsample_" + std::to_string(k));
  }
  s.conv("conv_leaky_relu_1", c, a.gen_hidden_1, 3, 1, 1).leaky_relu().mark("conv_leaky_relu_1")
      .conv("conv_leaky_relu_2", a.gen_hidden_1, a.gen_hidden_2, 3, 1, 1).leaky_relu().mark("conv_leaky_relu_2")
      .conv("conv_tanh_1", a.gen_hidden_2, out_channels, 3, 1, 1).tanh().mark("conv_tanh_1");
}

}  // namespace detail

/// Generator and critic of one model variant, for scalar type T (float,
/// double, or Dual<double> for second-order terms). Stateless apart from
/// the layer configuration; parameters are passed in.
template <typename T>
class RelationalGan {
 public:
  explicit RelationalGan(ModelConfig config)
      : config_(std::move(config)),
        generator_("generator"),
        critic_cond_("critic.condition"),
        critic_mask_("critic.mask"),
        critic_body_("critic") {
    config_.validate();
    build_generator();
    build_critic();
  }

  const ModelConfig& config() const { return config_; }
  const Architecture& arch() const { return config_.arch; }
  int mask_size() const { return config_.arch.mask_size(); }

  void declare(ParamSet<double>& generator, ParamSet<double>& critic) const {
    generator_.declare(generator);
    critic_cond_.declare(critic);
    critic_mask_.declare(critic);
    critic_body_.declare(critic);
  }

  /// Graph the relational layers run on: the diagram itself, or the complete
  /// graph when connectivity is ablated. CNN-only runs on a single node.
  NodeGraph relation_graph(const BubbleDiagram& d) const {
    if (config_.variant == ModelVariant::kCnnOnly) return NodeGraph::isolated(1);
    if (!config_.ablation.use_connectivity) return NodeGraph::build(d.size(), [](int, int) { return true; });
    return NodeGraph::build(d.size(), [&](int a, int b) { return d.has_edge(a, b); });
  }

  /// Per-room generator input [n, noise + 10] or, for CNN-only, the fixed
  /// [1, noise + 400 + 780] encoding (which consumes room 0's noise vector).
  Tensor<T> generator_input(const BubbleDiagram& d, std::span<const NoiseVector> noise) const {
    const Architecture& a = config_.arch;
    if (static_cast<int>(noise.size()) != d.size()) {
      throw ValidationError("expected one noise vector per room (" + std::to_string(d.size()) + "), got " +
                            std::to_string(noise.size()));
    }
    for (const auto& z : noise) {
      if (static_cast<int>(z.size()) != a.noise_dim) {
        throw ValidationError("noise vectors must have " + std::to_string(a.noise_dim) + " entries");
      }
    }
    if (config_.variant == ModelVariant::kCnnOnly) {
      check_capacity(d);
      Tensor<T> in({1, a.noise_dim + a.cnn_condition_dim()});
      for (int k = 0; k < a.noise_dim; ++k) in[static_cast<std::size_t>(k)] = nn::from_double<T>(noise[0][static_cast<std::size_t>(k)]);
      const Tensor<T> cond = cnn_condition(d);
      std::copy(cond.values().begin(), cond.values().end(), in.data() + a.noise_dim);
      return in;
    }
    const int width = a.noise_dim + kNumRoomTypes;
    Tensor<T> in({d.size(), width});
    for (int r = 0; r < d.size(); ++r) {
      T* row = in.node(r).data();
      for (int k = 0; k < a.noise_dim; ++k) row[k] = nn::from_double<T>(noise[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)]);
      if (config_.ablation.use_type) row[a.noise_dim + code(d.type(r))] = T(1);
    }
    return in;
  }

  GeneratorPass<T> generate(const ParamSet<T>& p, const BubbleDiagram& d, std::span<const NoiseVector> noise,
                            bool record = false) const {
    GeneratorPass<T> pass;
    pass.graph = relation_graph(d);
    const Tensor<T> input = generator_input(d, noise);
    Tensor<T> out = generator_.forward(p, input, pass.graph, record ? &pass.trace : nullptr);
    if (config_.variant == ModelVariant::kCnnOnly) {
      // Channel i of the fixed-size stack is room i.
      const int m = mask_size();
      const std::size_t plane = static_cast<std::size_t>(m) * m;
      Tensor<T> masks({d.size(), 1, m, m});
      std::copy(out.data(), out.data() + plane * static_cast<std::size_t>(d.size()), masks.data());
      pass.masks = std::move(masks);
    } else {
      pass.masks = std::move(out);
    }
    return pass;
  }

  /// Accumulates generator parameter gradients given dL/dmasks.
  void generator_backward(const ParamSet<T>& p, const GeneratorPass<T>& pass, const Tensor<T>& dmasks,
                          ParamSet<T>& grads) const {
    pass.masks.check_same(dmasks);
    Tensor<T> dout;
    if (config_.variant == ModelVariant::kCnnOnly) {
      const int m = mask_size();
      dout = Tensor<T>({1, config_.arch.max_rooms, m, m});
      std::copy(dmasks.values().begin(), dmasks.values().end(), dout.data());
    } else {
      dout = dmasks;
    }
    generator_.backward(p, pass.trace, std::move(dout), pass.graph, &grads);
  }

  /// Critic score for one diagram with masks [n, 1, M, M].
  CriticPass<T> critique(const ParamSet<T>& p, const BubbleDiagram& d, const Tensor<T>& masks,
                         bool record = false) const {
    const int m = mask_size();
    if (masks.shape() != nn::Shape{d.size(), 1, m, m}) {
      throw ValidationError("critic expects masks of shape " + nn::shape_string({d.size(), 1, m, m}) + ", got " +
                            nn::shape_string(masks.shape()));
    }
    CriticPass<T> pass;
    pass.rooms = d.size();
    pass.graph = relation_graph(d);
    const Tensor<T> cond = critic_condition(d);
    const Tensor<T> cond_feat = critic_cond_.forward(p, cond, pass.graph, record ? &pass.cond_trace : nullptr);
    Tensor<T> mask_feat;
    if (config_.variant == ModelVariant::kCnnOnly) {
      check_capacity(d);
      Tensor<T> stack({1, config_.arch.max_rooms, m, m});
      std::copy(masks.values().begin(), masks.values().end(), stack.data());
      mask_feat = critic_mask_.forward(p, stack, pass.graph, record ? &pass.mask_trace : nullptr);
    } else {
      mask_feat = masks;
    }
    const Tensor<T> joined = concat_channels(cond_feat, mask_feat);
    const Tensor<T> score = critic_body_.forward(p, joined, pass.graph, record ? &pass.body_trace : nullptr);
    pass.score = score[0];
    return pass;
  }

  /// Backpropagates dL/dscore; returns dL/dmasks [n, 1, M, M] and, when
  /// grads is non-null, accumulates critic parameter gradients.
  Tensor<T> critic_backward(const ParamSet<T>& p, const CriticPass<T>& pass, T dscore, ParamSet<T>* grads) const {
    const int m = mask_size();
    Tensor<T> dscore_t({1, 1});
    dscore_t[0] = dscore;
    const Tensor<T> djoined = critic_body_.backward(p, pass.body_trace, std::move(dscore_t), pass.graph, grads);
    auto [dcond, dmask_feat] = split_channels(djoined, config_.arch.type_channels);
    if (grads) critic_cond_.backward(p, pass.cond_trace, std::move(dcond), pass.graph, grads);
    Tensor<T> dmasks({pass.rooms, 1, m, m});
    if (config_.variant == ModelVariant::kCnnOnly) {
      const Tensor<T> dstack = critic_mask_.backward(p, pass.mask_trace, std::move(dmask_feat), pass.graph, grads);
      std::copy(dstack.data(), dstack.data() + dmasks.size(), dmasks.data());
    } else {
      dmasks = std::move(dmask_feat);
    }
    return dmasks;
  }

  /// Output shape of every architecture-table row for a recorded pass.
  std::vector<ShapeRow> generator_shapes(const GeneratorPass<T>& pass) const {
    std::vector<ShapeRow> rows;
    const nn::Shape& in = pass.trace.acts.at(0).shape();
    rows.emplace_back(config_.variant == ModelVariant::kCnnOnly ? "concat(z, t, c)" : "concat(z, t)",
                      nn::node_shape_string(in));
    for (auto& [row, shape] : generator_.marked_shapes(pass.trace)) rows.emplace_back(row, nn::node_shape_string(shape));
    return rows;
  }

  std::vector<ShapeRow> critic_shapes(const CriticPass<T>& pass) const {
    std::vector<ShapeRow> rows;
    if (config_.variant == ModelVariant::kCnnOnly) {
      rows.emplace_back("concat(t, c)", nn::node_shape_string(pass.cond_trace.acts.at(0).shape()));
    }
    for (auto& [row, shape] : critic_cond_.marked_shapes(pass.cond_trace)) rows.emplace_back(row, nn::node_shape_string(shape));
    if (config_.variant == ModelVariant::kCnnOnly) {
      for (auto& [row, shape] : critic_mask_.marked_shapes(pass.mask_trace)) rows.emplace_back(row, nn::node_shape_string(shape));
    }
    rows.emplace_back("concat(t, x)", nn::node_shape_string(pass.body_trace.acts.at(0).shape()));
    for (auto& [row, shape] : critic_body_.marked_shapes(pass.body_trace)) {
      rows.emplace_back(row, row == "pool_reshape_linear_1" ? std::to_string(shape.at(1)) : nn::node_shape_string(shape));
    }
    return rows;
  }

  /// Critic condition: per-room one-hot [n, 10] or the CNN-only [1, 1180]
  /// type + connectivity vector.
  Tensor<T> critic_condition(const BubbleDiagram& d) const {
    if (config_.variant == ModelVariant::kCnnOnly) return cnn_condition(d);
    Tensor<T> t({d.size(), kNumRoomTypes});
    if (config_.ablation.use_type) {
      for (int r = 0; r < d.size(); ++r) t.node(r)[static_cast<std::size_t>(code(d.type(r)))] = T(1);
    }
    return t;
  }

  /// Slot of the unordered pair (i, j), i < j, in the connectivity vector.
  static int pair_slot(int i, int j, int max_rooms) {
    return i * (2 * max_rooms - i - 1) / 2 + (j - i - 1);
  }

 private:
  void check_capacity(const BubbleDiagram& d) const {
    if (d.size() > config_.arch.max_rooms) {
      throw ValidationError("CNN-only model supports at most " + std::to_string(config_.arch.max_rooms) + " rooms");
    }
  }

  // [types for max_rooms slots ; connectivity over C(max_rooms, 2) pairs],
  // rooms in node-id order, zeros for absent rooms or ablated information.
  Tensor<T> cnn_condition(const BubbleDiagram& d) const {
    check_capacity(d);
    const Architecture& a = config_.arch;
    Tensor<T> c({1, a.cnn_condition_dim()});
    if (config_.ablation.use_type) {
      for (int r = 0; r < d.size(); ++r) c[static_cast<std::size_t>(r * kNumRoomTypes + code(d.type(r)))] = T(1);
    }
    if (config_.ablation.use_connectivity) {
      const int offset = a.max_rooms * kNumRoomTypes;
      for (auto [i, j] : d.edges()) c[static_cast<std::size_t>(offset + pair_slot(i, j, a.max_rooms))] = T(1);
    }
    return c;
  }

  static Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.nodes() != b.nodes() || a.rank() != 4 || b.rank() != 4 || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3)) {
      throw ValidationError("cannot concatenate " + nn::shape_string(a.shape()) + " and " + nn::shape_string(b.shape()));
    }
    Tensor<T> out({a.nodes(), a.dim(1) + b.dim(1), a.dim(2), a.dim(3)});
    for (int r = 0; r < a.nodes(); ++r) {
      auto dst = out.node(r);
      auto sa = a.node(r);
      auto sb = b.node(r);
      std::copy(sa.begin(), sa.end(), dst.begin());
      std::copy(sb.begin(), sb.end(), dst.begin() + static_cast<std::ptrdiff_t>(sa.size()));
    }
    return out;
  }

  static std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& x, int first) {
    Tensor<T> a({x.nodes(), first, x.dim(2), x.dim(3)});
    Tensor<T> b({x.nodes(), x.dim(1) - first, x.dim(2), x.dim(3)});
    for (int r = 0; r < x.nodes(); ++r) {
      auto src = x.node(r);
      auto da = a.node(r);
      auto db = b.node(r);
      std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(da.size()), da.begin());
      std::copy(src.begin() + static_cast<std::ptrdiff_t>(da.size()), src.end(), db.begin());
    }
    return {std::move(a), std::move(b)};
  }

  void build_generator() {
    const Architecture& a = config_.arch;
    const int c = a.channels;
    const int b = a.base_size;
    switch (config_.variant) {
      case ModelVariant::kHouseGan:
        generator_.linear("linear_reshape_1", a.noise_dim + kNumRoomTypes, c * b * b).leaky_relu()
            .reshape({c, b, b}).mark("linear_reshape_1");
        detail::add_decoder(generator_, a, true, 1);
        break;
      case ModelVariant::kCnnOnly:
        generator_.linear("linear_reshape_1", a.noise_dim + a.cnn_condition_dim(), c * b * b).leaky_relu()
            .reshape({c, b, b}).mark("linear_reshape_1");
        detail::add_decoder(generator_, a, false, a.max_rooms);
        break;
      case ModelVariant::kGcn:
        generator_.linear("linear_1", a.noise_dim + kNumRoomTypes, a.gcn_embedding).leaky_relu().mark("linear_1");
        detail::add_gcn(generator_, "gcn", a.gcn_embedding, a.gcn_hidden, a.gcn_rounds);
        generator_.linear("linear_2_reshape", a.gcn_embedding, c * b * b).leaky_relu()
            .reshape({c, b, b}).mark("linear_2_reshape");
        detail::add_decoder(generator_, a, false, 1);
        break;
    }
  }

  void build_critic() {
    const Architecture& a = config_.arch;
    const int c = a.channels;
    const int m = a.mask_size();
    const bool cnn = config_.variant == ModelVariant::kCnnOnly;
    const int cond_dim = cnn ? a.cnn_condition_dim() : kNumRoomTypes;
    critic_cond_.linear("linear_reshape_1", cond_dim, a.type_channels * m * m).leaky_relu()
        .reshape({a.type_channels, m, m}).mark(cnn ? "linear_reshape_1" : "linear_reshape_1(t)");
    if (cnn) {
      // Collapses the room stack to one channel so it joins the condition
      // volume as a single mask plane.
      critic_mask_.conv("reduce", a.max_rooms, 1, 1, 1, 0).mark("mask_reduce");
    }
    const bool relational = config_.variant == ModelVariant::kHouseGan;
    critic_body_.conv("encoder.conv_leaky_relu_1", a.type_channels + 1, c, 3, 1, 1).leaky_relu().mark("encoder.conv_leaky_relu_1")
        .conv("encoder.conv_leaky_relu_2", c, c, 3, 1, 1).leaky_relu().mark("encoder.conv_leaky_relu_2")
        .conv("encoder.conv_leaky_relu_3", c, c, 3, 1, 1).leaky_relu().mark("encoder.conv_leaky_relu_3");
    for (int k = 1; k <= 2; ++k) {
      if (relational) detail::add_conv_mpn(critic_body_, "conv_mpn_" + std::to_string(k), c);
      critic_body_.conv("downsample_" + std::to_string(k), c, c, 3, 2, 1).leaky_relu().mark("downsample_" + std::to_string(k));
    }
    critic_body_.conv("head.conv_leaky_relu_1", c, a.critic_hidden_1, 3, 2, 1).leaky_relu().mark("head.conv_leaky_relu_1")
        .conv("head.conv_leaky_relu_2", a.critic_hidden_1, a.critic_hidden_2, 3, 2, 1).leaky_relu().mark("head.conv_leaky_relu_2")
        .conv("head.conv_leaky_relu_3", a.critic_hidden_2, a.critic_embedding, 3, 2, 1).leaky_relu().mark("head.conv_leaky_relu_3")
        .reshape({a.critic_embedding});
    if (config_.variant == ModelVariant::kGcn) {
      detail::add_gcn(critic_body_, "gcn", a.critic_embedding, a.gcn_hidden, a.gcn_rounds);
    }
    critic_body_.node_sum().linear("pool_reshape_linear_1", a.critic_embedding, 1).mark("pool_reshape_linear_1");
  }

  ModelConfig config_;
  Sequential<T> generator_;
  Sequential<T> critic_cond_;
  Sequential<T> critic_mask_;
  Sequential<T> critic_body_;
};

/// Fresh, initialized parameters for a model.
struct ModelParams {
  ParamSet<double> generator;
  ParamSet<double> critic;
};

inline ModelParams make_params(const ModelConfig& config, std::uint64_t seed) {
  RelationalGan<double> model(config);
  ModelParams p;
  model.declare(p.generator, p.critic);
  p.generator.initialize(seed);
  p.critic.initialize(seed ^ 0xc0ffee);
  return p;
}

}  // namespace housegan
