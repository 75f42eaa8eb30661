#include "inrbench/losses.hpp"

#include <algorithm>
#include <cmath>

#include "inrbench/errors.hpp"
#include "inrbench/rng.hpp"

namespace inrb {

ValueAndGrad value_and_grad(const ParamFn& f, const std::vector<Tensor>& params) {
  ad::Tape tape;
  std::vector<ad::Var> vars;
  vars.reserve(params.size());
  for (const Tensor& p : params) vars.push_back(tape.leaf(p, true));
  ad::Var loss = f(tape, vars);
  const Tensor& lv = tape.value(loss);
  if (lv.numel() != 1) throw BuildError("value_and_grad: f must return a scalar");
  if (!std::isfinite(lv.data[0]))
    throw TrainingDiverged(-1, "non-finite loss in value_and_grad");
  tape.backward(loss);
  ValueAndGrad out;
  out.value = lv.data[0];
  out.grads.reserve(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    const Tensor& g = tape.grad(vars[i]);
    out.grads.push_back(g.data.empty() ? Tensor::zeros(params[i].shape) : g);
  }
  return out;
}

double mse_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target)) throw BuildError("mse_loss: shape mismatch");
  double s = 0.0;
  for (int64_t i = 0; i < pred.numel(); ++i) {
    const double d = pred.data[i] - target.data[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.numel());
}

double tv_penalty(const Tensor& grid, const std::vector<int64_t>& lattice_shape) {
  if (Tensor::numel_of(lattice_shape) != grid.numel())
    throw BuildError("tv_penalty: lattice shape does not cover grid");
  const int d = static_cast<int>(lattice_shape.size());
  std::vector<int64_t> stride(d, 1);
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * lattice_shape[a + 1];
  double total = 0.0;
  for (int axis = 0; axis < d; ++axis) {
    const int64_t ext = lattice_shape[axis];
    if (ext < 2) continue;
    const int64_t st = stride[axis];
    double s = 0.0;
    int64_t count = 0;
    for (int64_t i = 0; i < grid.numel(); ++i) {
      const int64_t pos = (i / st) % ext;
      if (pos == ext - 1) continue;
      s += std::fabs(grid.data[static_cast<size_t>(i + st)] -
                     grid.data[static_cast<size_t>(i)]);
      ++count;
    }
    total += s / static_cast<double>(count);
  }
  return total;
}

namespace {
double eval_only(const ParamFn& f, const std::vector<Tensor>& params) {
  ad::Tape tape;
  std::vector<ad::Var> vars;
  vars.reserve(params.size());
  for (const Tensor& p : params) vars.push_back(tape.leaf(p, false));
  return tape.value(f(tape, vars)).data[0];
}
}  // namespace

double finite_diff_check(const ParamFn& f, const std::vector<Tensor>& params, double h,
                         int64_t max_probes, uint64_t probe_seed) {
  ValueAndGrad vg = value_and_grad(f, params);
  std::vector<Tensor> work = params;
  double max_rel = 0.0;
  Rng rng(probe_seed);
  for (size_t t = 0; t < params.size(); ++t) {
    const int64_t n = params[t].numel();
    std::vector<int64_t> probes;
    if (max_probes <= 0 || n <= max_probes) {
      probes.resize(static_cast<size_t>(n));
      for (int64_t i = 0; i < n; ++i) probes[static_cast<size_t>(i)] = i;
    } else {
      for (int64_t k = 0; k < max_probes; ++k) probes.push_back(rng.uniform_int(n));
    }
    for (int64_t i : probes) {
      const double orig = work[t].data[i];
      work[t].data[i] = orig + h;
      const double fp = eval_only(f, work);
      work[t].data[i] = orig - h;
      const double fm = eval_only(f, work);
      work[t].data[i] = orig;
      const double cd = (fp - fm) / (2.0 * h);
      const double an = vg.grads[t].data[i];
      // absolute floor keeps fd rounding noise on near-zero gradients from
      // registering as O(1) relative error
      const double rel =
          std::fabs(an - cd) / std::max(std::fabs(an) + std::fabs(cd), 1e-6);
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace inrb
