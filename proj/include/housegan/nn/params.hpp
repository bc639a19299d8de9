#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "housegan/core/random.hpp"
#include "housegan/nn/dual.hpp"
#include "housegan/nn/tensor.hpp"

namespace housegan::nn {

/// Ordered collection of named parameter tensors. Insertion order is the
/// serialization order.
template <typename T>
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Tensor<T> value;
    /// Fan-in for initialization; zero marks a bias (initialized to zero).
    int fan_in = 0;
  };

  void add(std::string name, Shape shape, int fan_in) {
    if (index_.count(name)) throw ValidationError("duplicate parameter " + name);
    index_.emplace(name, entries_.size());
    entries_.push_back(Entry{std::move(name), Tensor<T>(std::move(shape)), fan_in});
  }

  bool contains(std::string_view name) const { return index_.count(std::string(name)) != 0; }

  Tensor<T>& at(std::string_view name) { return entries_[lookup(name)].value; }
  const Tensor<T>& at(std::string_view name) const { return entries_[lookup(name)].value; }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t count() const { return entries_.size(); }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
  }

  /// Same names and shapes, all zeros.
  ParamSet zeros_like() const {
    ParamSet out;
    for (const auto& e : entries_) out.add(e.name, e.value.shape(), e.fan_in);
    return out;
  }

  template <typename U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (const auto& e : entries_) {
      out.add(e.name, e.value.shape(), e.fan_in);
      auto& dst = out.at(e.name);
      for (std::size_t i = 0; i < e.value.size(); ++i) dst[i] = convert<U>(e.value[i]);
    }
    return out;
  }

  /// Fan-in scaled uniform weights U(-b, b) with b = sqrt(6 / ((1 + a^2) fan_in)),
  /// the variance-preserving bound for leaky ReLU with slope a = 0.1; zero
  /// biases. Each tensor draws from its own stream keyed by position.
  void initialize(std::uint64_t seed) {
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      Entry& e = entries_[k];
      if (e.fan_in <= 0) {
        e.value.fill(T(0));
        continue;
      }
      RandomStream rs(seed, {static_cast<std::uint64_t>(StreamDomain::kInit), k});
      const double bound = std::sqrt(6.0 / (1.01 * static_cast<double>(e.fan_in)));
      for (auto& x : e.value.values()) x = from_double<T>(rs.uniform(-bound, bound));
    }
  }

  /// Randomizes every entry including biases; used by property tests.
  void randomize(std::uint64_t seed, double bias_scale) {
    initialize(seed);
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      Entry& e = entries_[k];
      if (e.fan_in > 0) continue;
      RandomStream rs(seed, {static_cast<std::uint64_t>(StreamDomain::kInit), k, 1});
      for (auto& x : e.value.values()) x = from_double<T>(rs.uniform(-bias_scale, bias_scale));
    }
  }

  void set_zero() {
    for (auto& e : entries_) e.value.fill(T(0));
  }

  bool same_layout(const ParamSet& o) const {
    if (o.entries_.size() != entries_.size()) return false;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (o.entries_[k].name != entries_[k].name ||
          o.entries_[k].value.shape() != entries_[k].value.shape()) {
        return false;
      }
    }
    return true;
  }

 private:
  template <typename U, typename V>
  static U convert(const V& x) {
    if constexpr (std::is_same_v<U, V>) {
      return x;
    } else if constexpr (is_dual<V>::value) {
      return static_cast<U>(x.v);
    } else {
      return from_double<U>(static_cast<double>(x));
    }
  }

  std::size_t lookup(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw ValidationError("unknown parameter " + std::string(name));
    return it->second;
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Tangent parts of a Dual parameter set.
template <typename T>
ParamSet<T> tangents(const ParamSet<Dual<T>>& p) {
  ParamSet<T> out;
  for (const auto& e : p.entries()) {
    out.add(e.name, e.value.shape(), e.fan_in);
    auto& dst = out.at(e.name);
    for (std::size_t i = 0; i < e.value.size(); ++i) dst[i] = e.value[i].d;
  }
  return out;
}

}  // namespace housegan::nn
