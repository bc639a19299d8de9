#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "housegan/nn/gemm.hpp"
#include "housegan/nn/params.hpp"

namespace housegan::nn {

/// Relational structure seen by graph layers: for every node, the nodes it
/// is connected to and the nodes it is not connected to.
struct NodeGraph {
  std::vector<std::vector<int>> neighbors;
  std::vector<std::vector<int>> non_neighbors;

  int size() const { return static_cast<int>(neighbors.size()); }

  /// adjacency(a, b) must be symmetric.
  template <typename Adjacent>
  static NodeGraph build(int n, Adjacent&& adjacency) {
    NodeGraph g;
    g.neighbors.resize(static_cast<std::size_t>(n));
    g.non_neighbors.resize(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      for (int s = 0; s < n; ++s) {
        if (s == r) continue;
        (adjacency(r, s) ? g.neighbors : g.non_neighbors)[static_cast<std::size_t>(r)].push_back(s);
      }
    }
    return g;
  }

  static NodeGraph isolated(int n) {
    return build(n, [](int, int) { return false; });
  }
};

/// Stateless layer: parameters live in a ParamSet, activations in the
/// caller's trace, so one layer object serves concurrent passes.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual Tensor<T> forward(const ParamSet<T>& p, const Tensor<T>& x, const NodeGraph& g) const = 0;
  /// Returns dL/dx and, when grads is non-null, accumulates parameter
  /// gradients into it.
  virtual Tensor<T> backward(const ParamSet<T>& p, const Tensor<T>& x, const Tensor<T>& y,
                             const Tensor<T>& dy, const NodeGraph& g, ParamSet<T>* grads) const = 0;
  virtual void declare(ParamSet<double>&) const {}
};

template <typename T>
class Linear final : public Layer<T> {
 public:
  Linear(std::string name, int in, int out) : name_(std::move(name)), in_(in), out_(out) {}

  Shape output_shape(const Shape& in) const override {
    check(in);
    return {in[0], out_};
  }

  Tensor<T> forward(const ParamSet<T>& p, const Tensor<T>& x, const NodeGraph&) const override {
    check(x.shape());
    const int n = x.nodes();
    Tensor<T> y({n, out_});
    const auto& b = p.at(name_ + ".bias");
    for (int r = 0; r < n; ++r) {
      for (int o = 0; o < out_; ++o) y[static_cast<std::size_t>(r) * out_ + o] = b[static_cast<std::size_t>(o)];
    }
    gemm<T>(false, true, n, out_, in_, x.data(), p.at(name_ + ".weight").data(), y.data(), true);
    return y;
  }

  Tensor<T> backward(const ParamSet<T>& p, const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy,
                     const NodeGraph&, ParamSet<T>* grads) const override {
    const int n = x.nodes();
    Tensor<T> dx(x.shape());
    gemm<T>(false, false, n, in_, out_, dy.data(), p.at(name_ + ".weight").data(), dx.data(), false);
    if (grads) {
      gemm<T>(true, false, out_, in_, n, dy.data(), x.data(), grads->at(name_ + ".weight").data(), true);
      auto& db = grads->at(name_ + ".bias");
      for (int r = 0; r < n; ++r) {
        for (int o = 0; o < out_; ++o) db[static_cast<std::size_t>(o)] += dy[static_cast<std::size_t>(r) * out_ + o];
      }
    }
    return dx;
  }

  void declare(ParamSet<double>& params) const override {
    params.add(name_ + ".weight", {out_, in_}, in_);
    params.add(name_ + ".bias", {out_}, 0);
  }

 private:
  void check(const Shape& in) const {
    if (in.empty() || numel(in) != static_cast<std::size_t>(in[0]) * in_) {
      throw ValidationError(name_ + ": expected " + std::to_string(in_) + " features per node, got " +
                            shape_string(in));
    }
  }

  std::string name_;
  int in_, out_;
};

template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(std::string name, int cin, int cout, int kernel, int stride, int padding)
      : name_(std::move(name)), cin_(cin), cout_(cout), kernel_(kernel), stride_(stride), padding_(padding) {}

  Shape output_shape(const Shape& in) const override {
    const ConvGeometry g = geometry(in);
    return {in[0], cout_, g.out_height(), g.out_width()};
  }

  Tensor<T> forward(const ParamSet<T>& p, const Tensor<T>& x, const NodeGraph&) const override {
    const ConvGeometry g = geometry(x.shape());
    Tensor<T> y(output_shape(x.shape()));
    const auto& w = p.at(name_ + ".weight");
    const auto& b = p.at(name_ + ".bias");
    std::vector<T> cols(static_cast<std::size_t>(g.rows()) * g.cols());
    const std::size_t plane = static_cast<std::size_t>(g.cols());
    for (int n = 0; n < x.nodes(); ++n) {
      im2col(x.node(n).data(), g, cols.data());
      T* out = y.node(n).data();
      for (int o = 0; o < cout_; ++o) std::fill(out + o * plane, out + (o + 1) * plane, b[static_cast<std::size_t>(o)]);
      gemm<T>(false, false, cout_, g.cols(), g.rows(), w.data(), cols.data(), out, true);
    }
    return y;
  }

  Tensor<T> backward(const ParamSet<T>& p, const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy,
                     const NodeGraph&, ParamSet<T>* grads) const override {
    const ConvGeometry g = geometry(x.shape());
    const auto& w = p.at(name_ + ".weight");
    Tensor<T> dx(x.shape());
    std::vector<T> cols(static_cast<std::size_t>(g.rows()) * g.cols());
    std::vector<T> dcols(cols.size());
    const std::size_t plane = static_cast<std::size_t>(g.cols());
    for (int n = 0; n < x.nodes(); ++n) {
      const T* dout = dy.node(n).data();
      if (grads) {
        im2col(x.node(n).data(), g, cols.data());
        gemm<T>(false, true, cout_, g.rows(), g.cols(), dout, cols.data(), grads->at(name_ + ".weight").data(), true);
        auto& db = grads->at(name_ + ".bias");
        for (int o = 0; o < cout_; ++o) {
          T s(0);
          for (std::size_t i = 0; i < plane; ++i) s += dout[o * plane + i];
          db[static_cast<std::size_t>(o)] += s;
        }
      }
      gemm<T>(true, false, g.rows(), g.cols(), cout_, w.data(), dout, dcols.data(), false);
      col2im(dcols.data(), g, dx.node(n).data());
    }
    return dx;
  }

  void declare(ParamSet<double>& params) const override {
    const int fan_in = cin_ * kernel_ * kernel_;
    params.add(name_ + ".weight", {cout_, cin_, kernel_, kernel_}, fan_in);
    params.add(name_ + ".bias", {cout_}, 0);
  }

 private:
  ConvGeometry geometry(const Shape& in) const {
    if (in.size() != 4 || in[1] != cin_) {
      throw ValidationError(name_ + ": expected [N," + std::to_string(cin_) + ",H,W] input, got " +
                            shape_string(in));
    }
    return ConvGeometry{cin_, in[2], in[3], kernel_, stride_, padding_};
  }

  std::string name_;
  int cin_, cout_, kernel_, stride_, padding_;
};

/// Transposed convolution (the adjoint of Conv2d's data path). Weight layout
/// is [cin, cout, k, k].
template <typename T>
class ConvTranspose2d final : public Layer<T> {
 public:
  ConvTranspose2d(std::string name, int cin, int cout, int kernel, int stride, int padding)
      : name_(std::move(name)), cin_(cin), cout_(cout), kernel_(kernel), stride_(stride), padding_(padding) {}

  Shape output_shape(const Shape& in) const override {
    check(in);
    return {in[0], cout_, (in[2] - 1) * stride_ - 2 * padding_ + kernel_,
            (in[3] - 1) * stride_ - 2 * padding_ + kernel_};
  }

  Tensor<T> forward(const ParamSet<T>& p, const Tensor<T>& x, const NodeGraph&) const override {
    const Shape out_shape = output_shape(x.shape());
    const ConvGeometry g = geometry(out_shape, x.shape());
    Tensor<T> y(out_shape);
    const auto& w = p.at(name_ + ".weight");
    const auto& b = p.at(name_ + ".bias");
    const int in_plane = x.dim(2) * x.dim(3);
    const std::size_t out_plane = static_cast<std::size_t>(out_shape[2]) * out_shape[3];
    std::vector<T> cols(static_cast<std::size_t>(g.rows()) * in_plane);
    for (int n = 0; n < x.nodes(); ++n) {
      gemm<T>(true, false, g.rows(), in_plane, cin_, w.data(), x.node(n).data(), cols.data(), false);
      T* out = y.node(n).data();
      for (int o = 0; o < cout_; ++o) std::fill(out + o * out_plane, out + (o + 1) * out_plane, b[static_cast<std::size_t>(o)]);
      col2im(cols.data(), g, out);
    }
    return y;
  }

  Tensor<T> backward(const ParamSet<T>& p, const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& dy,
                     const NodeGraph&, ParamSet<T>* grads) const override {
    const ConvGeometry g = geometry(y.shape(), x.shape());
    const auto& w = p.at(name_ + ".weight");
    const int in_plane = x.dim(2) * x.dim(3);
    const std::size_t out_plane = static_cast<std::size_t>(y.dim(2)) * y.dim(3);
    Tensor<T> dx(x.shape());
    std::vector<T> dcols(static_cast<std::size_t>(g.rows()) * in_plane);
    for (int n = 0; n < x.nodes(); ++n) {
      const T* dout = dy.node(n).data();
      im2col(dout, g, dcols.data());
      gemm<T>(false, false, cin_, in_plane, g.rows(), w.data(), dcols.data(), dx.node(n).data(), false);
      if (grads) {
        gemm<T>(false, true, cin_, g.rows(), in_plane, x.node(n).data(), dcols.data(),
                grads->at(name_ + ".weight").data(), true);
        auto& db = grads->at(name_ + ".bias");
        for (int o = 0; o < cout_; ++o) {
          T s(0);
          for (std::size_t i = 0; i < out_plane; ++i) s += dout[o * out_plane + i];
          db[static_cast<std::size_t>(o)] += s;
        }
      }
    }
    return dx;
  }

  void declare(ParamSet<double>& params) const override {
    params.add(name_ + ".weight", {cin_, cout_, kernel_, kernel_}, cin_ * kernel_ * kernel_);
    params.add(name_ + ".bias", {cout_}, 0);
  }

 private:
  void check(const Shape& in) const {
    if (in.size() != 4 || in[1] != cin_) {
      throw ValidationError(name_ + ": expected [N," + std::to_string(cin_) + ",H,W] input, got " +
                            shape_string(in));
    }
  }

  // The convolution that maps the output grid back onto the input grid.
  ConvGeometry geometry(const Shape& out, const Shape& in) const {
    ConvGeometry g{cout_, out[2], out[3], kernel_, stride_, padding_};
    if (g.out_height() != in[2] || g.out_width() != in[3]) {
      throw ValidationError(name_ + ": inconsistent transposed-convolution geometry");
    }
    return g;
  }

  std::string name_;
  int cin_, cout_, kernel_, stride_, padding_;
};

template <typename T>
class LeakyRelu final : public Layer<T> {
 public:
  explicit LeakyRelu(double slope = 0.1) : slope_(slope) {}

  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<T> forward(const ParamSet<T>&, const Tensor<T>& x, const NodeGraph&) const override {
    Tensor<T> y = x;
    const T a = from_double<T>(slope_);
    for (auto& v : y.values()) {
      if (!(primal(v) > 0.0)) v = a * v;
    }
    return y;
  }

  Tensor<T> backward(const ParamSet<T>&, const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy,
                     const NodeGraph&, ParamSet<T>*) const override {
    Tensor<T> dx = dy;
    const T a = from_double<T>(slope_);
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (!(primal(x[i]) > 0.0)) dx[i] = a * dx[i];
    }
    return dx;
  }

 private:
  double slope_;
};

template <typename T>
class Tanh final : public Layer<T> {
 public:
  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<T> forward(const ParamSet<T>&, const Tensor<T>& x, const NodeGraph&) const override {
    using std::tanh;
    Tensor<T> y = x;
    for (auto& v : y.values()) v = tanh(v);
    return y;
  }

  Tensor<T> backward(const ParamSet<T>&, const Tensor<T>&, const Tensor<T>& y, const Tensor<T>& dy,
                     const NodeGraph&, ParamSet<T>*) const override {
    Tensor<T> dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = dx[i] * (T(1) - y[i] * y[i]);
    return dx;
  }
};

/// Reinterprets each node's block with a new per-node shape.
template <typename T>
class Reshape final : public Layer<T> {
 public:
  explicit Reshape(Shape per_node) : per_node_(std::move(per_node)) {}

  Shape output_shape(const Shape& in) const override {
    Shape out = {in.at(0)};
    out.insert(out.end(), per_node_.begin(), per_node_.end());
    if (numel(out) != numel(in)) {
      throw ValidationError("reshape: cannot view " + shape_string(in) + " as " + shape_string(out));
    }
    return out;
  }

  Tensor<T> forward(const ParamSet<T>&, const Tensor<T>& x, const NodeGraph&) const override {
    return x.reshaped(output_shape(x.shape()));
  }

  Tensor<T> backward(const ParamSet<T>&, const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy,
                     const NodeGraph&, ParamSet<T>*) const override {
    return dy.reshaped(x.shape());
  }

 private:
  Shape per_node_;
};

enum class PoolMode { kSum, kMean };

/// Relational message assembly: every node's block becomes
/// [own ; pool over connected nodes ; pool over non-connected nodes]
/// along dimension 1. Empty pools contribute zeros.
template <typename T>
class GraphPoolConcat final : public Layer<T> {
 public:
  explicit GraphPoolConcat(PoolMode mode) : mode_(mode) {}

  Shape output_shape(const Shape& in) const override {
    if (in.size() < 2) throw ValidationError("graph pooling needs a node-batched tensor");
    Shape out = in;
    out[1] *= 3;
    return out;
  }

  Tensor<T> forward(const ParamSet<T>&, const Tensor<T>& x, const NodeGraph& g) const override {
    check(x, g);
    Tensor<T> y(output_shape(x.shape()));
    const std::size_t f = x.node_size();
    for (int r = 0; r < x.nodes(); ++r) {
      T* out = y.node(r).data();
      auto self = x.node(r);
      std::copy(self.begin(), self.end(), out);
      pool(x, g.neighbors[static_cast<std::size_t>(r)], out + f);
      pool(x, g.non_neighbors[static_cast<std::size_t>(r)], out + 2 * f);
    }
    return y;
  }

  Tensor<T> backward(const ParamSet<T>&, const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy,
                     const NodeGraph& g, ParamSet<T>*) const override {
    Tensor<T> dx(x.shape());
    const std::size_t f = x.node_size();
    for (int r = 0; r < x.nodes(); ++r) {
      const T* d = dy.node(r).data();
      T* own = dx.node(r).data();
      for (std::size_t i = 0; i < f; ++i) own[i] += d[i];
      scatter(dx, g.neighbors[static_cast<std::size_t>(r)], d + f);
      scatter(dx, g.non_neighbors[static_cast<std::size_t>(r)], d + 2 * f);
    }
    return dx;
  }

 private:
  void check(const Tensor<T>& x, const NodeGraph& g) const {
    if (x.nodes() != g.size()) {
      throw ValidationError("graph pooling: tensor has " + std::to_string(x.nodes()) +
                            " nodes but the graph has " + std::to_string(g.size()));
    }
  }

  T weight(std::size_t members) const {
    return mode_ == PoolMode::kMean ? T(1) / from_double<T>(static_cast<double>(members)) : T(1);
  }

  void pool(const Tensor<T>& x, const std::vector<int>& members, T* out) const {
    if (members.empty()) return;
    const std::size_t f = x.node_size();
    for (int s : members) {
      const T* in = x.node(s).data();
      for (std::size_t i = 0; i < f; ++i) out[i] += in[i];
    }
    if (mode_ == PoolMode::kMean) {
      const T w = weight(members.size());
      for (std::size_t i = 0; i < f; ++i) out[i] *= w;
    }
  }

  void scatter(Tensor<T>& dx, const std::vector<int>& members, const T* d) const {
    if (members.empty()) return;
    const std::size_t f = dx.node_size();
    const T w = weight(members.size());
    for (int s : members) {
      T* out = dx.node(s).data();
      for (std::size_t i = 0; i < f; ++i) out[i] += w * d[i];
    }
  }

  PoolMode mode_;
};

/// Sums all node blocks into a single node.
template <typename T>
class NodeSum final : public Layer<T> {
 public:
  Shape output_shape(const Shape& in) const override {
    Shape out = in;
    out.at(0) = 1;
    return out;
  }

  Tensor<T> forward(const ParamSet<T>&, const Tensor<T>& x, const NodeGraph&) const override {
    Tensor<T> y(output_shape(x.shape()));
    for (int r = 0; r < x.nodes(); ++r) {
      auto in = x.node(r);
      for (std::size_t i = 0; i < in.size(); ++i) y[i] += in[i];
    }
    return y;
  }

  Tensor<T> backward(const ParamSet<T>&, const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy,
                     const NodeGraph&, ParamSet<T>*) const override {
    Tensor<T> dx(x.shape());
    for (int r = 0; r < x.nodes(); ++r) {
      auto out = dx.node(r);
      std::copy(dy.values().begin(), dy.values().end(), out.begin());
    }
    return dx;
  }
};

}  // namespace housegan::nn
