#pragma once

#include <cmath>
#include <cstdint>

#include "housegan/nn/params.hpp"

namespace housegan::nn {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moments are stored with the same names and
/// shapes as the parameters they track.
class Adam {
 public:
  Adam() = default;
  Adam(AdamConfig config, const ParamSet<double>& like)
      : config_(config), m_(like.zeros_like()), v_(like.zeros_like()) {}

  void step(ParamSet<double>& params, const ParamSet<double>& grads) {
    if (!params.same_layout(grads) || !params.same_layout(m_)) {
      throw ValidationError("optimizer state does not match the parameters");
    }
    ++steps_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
    auto& pe = params.entries();
    for (std::size_t k = 0; k < pe.size(); ++k) {
      auto& w = pe[k].value;
      const auto& g = grads.entries()[k].value;
      auto& m = m_.entries()[k].value;
      auto& v = v_.entries()[k].value;
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = config_.beta1 * m[i] + (1 - config_.beta1) * g[i];
        v[i] = config_.beta2 * v[i] + (1 - config_.beta2) * g[i] * g[i];
        w[i] -= config_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
      }
    }
  }

  const AdamConfig& config() const { return config_; }
  std::int64_t steps() const { return steps_; }
  const ParamSet<double>& first_moment() const { return m_; }
  const ParamSet<double>& second_moment() const { return v_; }

  /// Restores a saved state; shapes must match the current moments.
  void restore(std::int64_t steps, ParamSet<double> m, ParamSet<double> v) {
    if (!m.same_layout(m_) || !v.same_layout(v_)) throw ValidationError("optimizer state layout mismatch");
    steps_ = steps;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  AdamConfig config_;
  ParamSet<double> m_;
  ParamSet<double> v_;
  std::int64_t steps_ = 0;
};

}  // namespace housegan::nn
