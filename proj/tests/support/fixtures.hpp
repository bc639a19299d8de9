#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "housegan/core/diagram.hpp"
#include "housegan/core/random.hpp"
#include "housegan/nn/params.hpp"

namespace housegan::fixtures {

inline BubbleDiagram random_diagram(RandomStream& rs, int min_nodes, int max_nodes, double edge_p = 0.4) {
  const int n = rs.uniform_int(min_nodes, max_nodes);
  std::vector<RoomType> types;
  for (int i = 0; i < n; ++i) types.push_back(room_type_from_code(rs.uniform_int(0, 9)));
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rs.uniform() < edge_p) edges.emplace_back(i, j);
  return BubbleDiagram(types, edges);
}

inline std::vector<NoiseVector> random_noise(RandomStream& rs, int rooms, int dim) {
  std::vector<NoiseVector> z;
  for (int r = 0; r < rooms; ++r) z.push_back(rs.normal_vector(dim));
  return z;
}

inline std::vector<int> random_permutation(RandomStream& rs, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(rs.uniform_int(0, i))]);
  return p;
}

/// Moves element i to position perm[i].
template <typename V>
std::vector<V> scatter(const std::vector<V>& v, const std::vector<int>& perm) {
  std::vector<V> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(perm[i])] = v[i];
  return out;
}

/// Central-difference derivative of f at every coordinate of x.
template <typename F>
std::vector<double> central_difference(std::vector<double> x, F&& f, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

/// Central differences at a deterministic subset of at most `budget`
/// coordinates; returns (indices, derivatives).
template <typename F>
std::pair<std::vector<std::size_t>, std::vector<double>> sampled_central_difference(std::vector<double> x, F&& f,
                                                                                   std::size_t budget,
                                                                                   std::uint64_t seed,
                                                                                   double h = 1e-6) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (idx.size() > budget) {
    RandomStream rs(seed);
    for (std::size_t i = 0; i < budget; ++i) {
      const auto j = i + static_cast<std::size_t>(rs.next_u64() % (idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(budget);
    std::sort(idx.begin(), idx.end());
  }
  std::vector<double> g;
  for (std::size_t i : idx) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g.push_back((up - down) / (2 * h));
  }
  return {idx, g};
}

template <typename V>
std::vector<double> pick(const V& v, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

/// max |a - b| / max(|a|, |b|, floor) over all entries.
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-3) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

inline std::vector<double> flatten(const nn::ParamSet<double>& p) {
  std::vector<double> out;
  for (const auto& e : p.entries()) out.insert(out.end(), e.value.values().begin(), e.value.values().end());
  return out;
}

inline void unflatten(const std::vector<double>& flat, nn::ParamSet<double>& p) {
  std::size_t k = 0;
  for (auto& e : p.entries())
    for (auto& v : e.value.values()) v = flat[k++];
}

}  // namespace housegan::fixtures
