#pragma once

#include <functional>
#include <vector>

#include "inrbench/autodiff.hpp"
#include "inrbench/tensor.hpp"

namespace inrb {

// A computation over a parameter set, expressed on a tape. Vars arrive in the
// same order as the parameter tensors.
using ParamFn = std::function<ad::Var(ad::Tape&, const std::vector<ad::Var>&)>;

struct ValueAndGrad {
  double value = 0.0;
  std::vector<Tensor> grads;
};

// Evaluates f and its gradient with respect to every parameter.
// Throws TrainingDiverged if the loss is non-finite.
ValueAndGrad value_and_grad(const ParamFn& f, const std::vector<Tensor>& params);

double mse_loss(const Tensor& pred, const Tensor& target);

// Anisotropic TV: sum over axes of the mean absolute forward difference.
double tv_penalty(const Tensor& grid, const std::vector<int64_t>& lattice_shape);

// Max relative error between analytic gradients and central finite
// differences at step h. Probes at most `max_probes` coordinates per
// parameter (all when max_probes <= 0), chosen deterministically.
double finite_diff_check(const ParamFn& f, const std::vector<Tensor>& params, double h,
                         int64_t max_probes = 0, uint64_t probe_seed = 7);

}  // namespace inrb
