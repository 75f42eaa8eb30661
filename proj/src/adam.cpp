#include "inrbench/adam.hpp"

#include <cmath>

#include "inrbench/errors.hpp"

namespace inrb {

AdamState AdamState::init(const std::vector<Tensor>& params, double lr) {
  AdamState s;
  s.lr = lr;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const Tensor& p : params) {
    s.m.push_back(Tensor::zeros(p.shape));
    s.v.push_back(Tensor::zeros(p.shape));
  }
  return s;
}

void adam_step(std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw BuildError("adam_step: parameter/gradient/state count mismatch");
  state.step += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (size_t t = 0; t < params.size(); ++t) {
    Tensor& p = *params[t];
    const Tensor& g = *grads[t];
    if (!p.same_shape(g) || !p.same_shape(state.m[t]))
      throw BuildError("adam_step: shape mismatch at parameter " + std::to_string(t));
    Tensor& m = state.m[t];
    Tensor& v = state.v[t];
    for (int64_t i = 0; i < p.numel(); ++i) {
      m.data[i] = b1 * m.data[i] + (1.0 - b1) * g.data[i];
      v.data[i] = b2 * v.data[i] + (1.0 - b2) * g.data[i] * g.data[i];
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      p.data[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

}  // namespace inrb
