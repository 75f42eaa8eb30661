#pragma once

#include <cstdint>
#include <vector>

#include "inrbench/tensor.hpp"

namespace inrb {

// Bias-corrected Adam. One state covers a whole parameter set; moments are
// kept per parameter tensor.
struct AdamState {
  int64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double lr = 1e-3;
  double eps = 1e-8;

  static AdamState init(const std::vector<Tensor>& params, double lr);
};

void adam_step(std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state);

}  // namespace inrb
