#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "housegan/nn/layers.hpp"

namespace housegan::nn {

/// Activations recorded by a forward pass: acts[0] is the input and
/// acts[i + 1] the output of layer i.
template <typename T>
struct Trace {
  std::vector<Tensor<T>> acts;
};

/// Ordered stack of layers sharing one parameter scope. Rows of an
/// architecture table can be marked so their output shapes can be audited.
template <typename T>
class Sequential {
 public:
  explicit Sequential(std::string scope = {}) : scope_(std::move(scope)) {}

  Sequential& linear(const std::string& name, int in, int out) {
    return push(std::make_unique<Linear<T>>(qualify(name), in, out));
  }
  Sequential& conv(const std::string& name, int cin, int cout, int kernel, int stride, int padding) {
    return push(std::make_unique<Conv2d<T>>(qualify(name), cin, cout, kernel, stride, padding));
  }
  Sequential& conv_transpose(const std::string& name, int cin, int cout, int kernel, int stride, int padding) {
    return push(std::make_unique<ConvTranspose2d<T>>(qualify(name), cin, cout, kernel, stride, padding));
  }
  Sequential& leaky_relu(double slope = 0.1) { return push(std::make_unique<LeakyRelu<T>>(slope)); }
  Sequential& tanh() { return push(std::make_unique<Tanh<T>>()); }
  Sequential& reshape(Shape per_node) { return push(std::make_unique<Reshape<T>>(std::move(per_node))); }
  Sequential& graph_pool(PoolMode mode) { return push(std::make_unique<GraphPoolConcat<T>>(mode)); }
  Sequential& node_sum() { return push(std::make_unique<NodeSum<T>>()); }

  /// Labels the output of the most recently added layer.
  Sequential& mark(std::string row) {
    marks_.emplace_back(std::move(row), layers_.size());
    return *this;
  }

  bool empty() const { return layers_.empty(); }
  std::size_t size() const { return layers_.size(); }

  Shape output_shape(Shape in) const {
    for (const auto& l : layers_) in = l->output_shape(in);
    return in;
  }

  Tensor<T> forward(const ParamSet<T>& p, const Tensor<T>& x, const NodeGraph& g, Trace<T>* trace) const {
    if (trace) {
      trace->acts.clear();
      trace->acts.reserve(layers_.size() + 1);
      trace->acts.push_back(x);
      for (const auto& l : layers_) trace->acts.push_back(l->forward(p, trace->acts.back(), g));
      return trace->acts.back();
    }
    Tensor<T> cur = x;
    for (const auto& l : layers_) cur = l->forward(p, cur, g);
    return cur;
  }

  Tensor<T> backward(const ParamSet<T>& p, const Trace<T>& trace, Tensor<T> dy, const NodeGraph& g,
                     ParamSet<T>* grads) const {
    if (trace.acts.size() != layers_.size() + 1) {
      throw ValidationError("backward called without a matching forward trace");
    }
    for (std::size_t i = layers_.size(); i-- > 0;) {
      dy = layers_[i]->backward(p, trace.acts[i], trace.acts[i + 1], dy, g, grads);
    }
    return dy;
  }

  void declare(ParamSet<double>& params) const {
    for (const auto& l : layers_) l->declare(params);
  }

  /// (row label, output shape) for every marked row of a recorded pass.
  std::vector<std::pair<std::string, Shape>> marked_shapes(const Trace<T>& trace) const {
    std::vector<std::pair<std::string, Shape>> out;
    for (const auto& [row, end] : marks_) out.emplace_back(row, trace.acts.at(end).shape());
    return out;
  }

 private:
  Sequential& push(std::unique_ptr<Layer<T>> layer) {
    layers_.push_back(std::move(layer));
    return *this;
  }

  std::string qualify(const std::string& name) const { return scope_.empty() ? name : scope_ + "." + name; }

  std::string scope_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  std::vector<std::pair<std::string, std::size_t>> marks_;
};

}  // namespace housegan::nn
