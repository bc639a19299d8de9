#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "housegan/core/error.hpp"

namespace housegan::nn {

using Shape = std::vector<int>;

inline std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

/// Formats the per-node part of a node-batched shape the way architecture
/// tables do: [N, C, H, W] -> "HxWxC", [N, D] -> "1xD".
inline std::string node_shape_string(const Shape& shape) {
  if (shape.size() == 4) {
    return std::to_string(shape[2]) + "x" + std::to_string(shape[3]) + "x" + std::to_string(shape[1]);
  }
  if (shape.size() == 2) return "1x" + std::to_string(shape[1]);
  std::string s;
  for (std::size_t i = 1; i < shape.size(); ++i) {
    if (i > 1) s += "x";
    s += std::to_string(shape[i]);
  }
  return s;
}

inline std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

/// Dense row-major tensor. Model tensors are node-batched: dimension 0 is
/// the room index and every node owns a contiguous block.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape) : shape_(std::move(shape)), data_(numel(shape_), T(0)) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != numel(shape_)) {
      throw ValidationError("tensor data does not match shape " + shape_string(shape_));
    }
  }

  const Shape& shape() const { return shape_; }
  int dim(std::size_t i) const { return shape_.at(i); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  int nodes() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t node_size() const { return nodes() == 0 ? 0 : data_.size() / static_cast<std::size_t>(nodes()); }
  std::span<T> node(int n) {
    return std::span<T>(data_).subspan(static_cast<std::size_t>(n) * node_size(), node_size());
  }
  std::span<const T> node(int n) const {
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(n) * node_size(), node_size());
  }

  Tensor reshaped(Shape shape) const& {
    check_reshape(shape);
    return Tensor(std::move(shape), data_);
  }
  Tensor reshaped(Shape shape) && {
    check_reshape(shape);
    return Tensor(std::move(shape), std::move(data_));
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  template <typename U, typename F>
  Tensor<U> map(F&& f) const {
    std::vector<U> out;
    out.reserve(data_.size());
    for (const T& x : data_) out.push_back(f(x));
    return Tensor<U>(shape_, std::move(out));
  }

  Tensor& operator+=(const Tensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  void check_same(const Tensor& o) const {
    if (o.shape_ != shape_) {
      throw ValidationError("tensor shape mismatch: " + shape_string(shape_) + " vs " +
                            shape_string(o.shape_));
    }
  }

 private:
  void check_reshape(const Shape& shape) const {
    if (numel(shape) != data_.size()) {
      throw ValidationError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    }
  }

  Shape shape_;
  std::vector<T> data_;
};

}  // namespace housegan::nn
