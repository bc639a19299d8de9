#pragma once

#include <cmath>

#include "housegan/nn/dual.hpp"
#include "housegan/relnet/model.hpp"

namespace housegan {

using DualD = nn::Dual<double>;

/// x_hat = eps * real + (1 - eps) * fake, pixel-wise, rooms aligned.
inline nn::Tensor<double> interpolate_masks(const nn::Tensor<double>& real, const nn::Tensor<double>& fake, double eps) {
  real.check_same(fake);
  nn::Tensor<double> x(real.shape());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = eps * real[i] + (1.0 - eps) * fake[i];
  return x;
}

struct PenaltyTerm {
  /// (||g|| - 1)^2 with g the critic's input gradient at x_hat.
  double value = 0;
  double grad_norm = 0;
  nn::Tensor<double> input_grad;
};

/// Value of the penalty at the interpolate of one sample. The norm runs over
/// every pixel of every room jointly.
inline PenaltyTerm gradient_penalty(const RelationalGan<double>& model, const nn::ParamSet<double>& critic,
                                    const BubbleDiagram& d, const nn::Tensor<double>& real,
                                    const nn::Tensor<double>& fake, double eps) {
  if (eps < 0.0 || eps > 1.0) throw ValidationError("interpolation coefficient must lie in [0, 1]");
  const nn::Tensor<double> x = interpolate_masks(real, fake, eps);
  const auto pass = model.critique(critic, d, x, true);
  PenaltyTerm t;
  t.input_grad = model.critic_backward(critic, pass, 1.0, nullptr);
  double sq = 0;
  for (double g : t.input_grad.values()) sq += g * g;
  t.grad_norm = std::sqrt(sq);
  t.value = (t.grad_norm - 1.0) * (t.grad_norm - 1.0);
  return t;
}

/// Adds weight * d(penalty)/d(critic params) into grads and returns the
/// penalty.
///
/// d/dθ (||g|| - 1)^2 = u . d g/dθ with u = 2 (||g|| - 1) g / ||g||, and
/// u . d g/dθ is the directional derivative of dD/dθ along u in input space.
/// Running the critic's forward and backward pass in dual numbers with input
/// tangent u yields exactly that as the tangent part of the parameter
/// gradient.
inline PenaltyTerm accumulate_gradient_penalty(const RelationalGan<double>& model, const RelationalGan<DualD>& dual_model,
                                               const nn::ParamSet<double>& critic, const nn::ParamSet<DualD>& dual_critic,
                                               const BubbleDiagram& d, const nn::Tensor<double>& real,
                                               const nn::Tensor<double>& fake, double eps, double weight,
                                               nn::ParamSet<double>& grads) {
  PenaltyTerm t = gradient_penalty(model, critic, d, real, fake, eps);
  if (weight == 0.0 || t.grad_norm == 0.0) return t;
  const double scale = 2.0 * (t.grad_norm - 1.0) / t.grad_norm;
  const nn::Tensor<double> x = interpolate_masks(real, fake, eps);
  nn::Tensor<DualD> xd(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) xd[i] = DualD(x[i], scale * t.input_grad[i]);

  const auto pass = dual_model.critique(dual_critic, d, xd, true);
  auto dual_grads = dual_critic.zeros_like();
  dual_model.critic_backward(dual_critic, pass, DualD(1.0), &dual_grads);
  auto& out = grads.entries();
  const auto& in = dual_grads.entries();
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t i = 0; i < out[k].value.size(); ++i) out[k].value[i] += weight * in[k].value[i].d;
  }
  return t;
}

}  // namespace housegan
