#pragma once

#include "inrbench/autodiff.hpp"
#include "inrbench/tensor.hpp"

namespace inrb {

// Differentiable 2D Gaussian splat renderer, fused as one tape op.
//
//   means   [N,2]  centers in [-1,1)^2
//   chol    [N,3]  (a, b, c): precision Cholesky M = [[e^a, 0], [c, e^b]]
//   opacity [N,1]  pre-sigmoid
//   color   [N,C]
//   coords  [B,2]  query points
//
// Per point p and Gaussian i: alpha_i = min(0.995, sigmoid(op_i) *
// exp(-q_i/2)) with q_i = |M_i (p - mu_i)|^2, composited front-to-back in
// list order with the over operator. Gaussians are truncated at q > 50
// (identically zero there, in forward and backward alike).
ad::Var gsplat_render(ad::Tape& t, ad::Var means, ad::Var chol, ad::Var opacity,
                      ad::Var color, const Tensor& coords);

// Untruncated per-point double loop used as a test oracle.
Tensor gsplat_render_oracle(const Tensor& means, const Tensor& chol,
                            const Tensor& opacity, const Tensor& color,
                            const Tensor& coords);

}  // namespace inrb
