#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "inrbench/tensor.hpp"

namespace inrb::ad {

struct Var {
  int32_t id = -1;
  bool valid() const { return id >= 0; }
};

// Integer index matrix used by gather-style ops (interpolation taps, hash
// table lookups). Shared so backward closures can hold it cheaply.
struct IndexMat {
  int64_t rows = 0, cols = 0;
  std::vector<int64_t> idx;
  int64_t at(int64_t r, int64_t c) const { return idx[static_cast<size_t>(r * cols + c)]; }
};
using IndexMatPtr = std::shared_ptr<const IndexMat>;

// Reverse-mode tape over a fixed primitive set. One tape per training step;
// nodes are appended in evaluation order and walked backwards once.
class Tape {
 public:
  Var leaf(Tensor value, bool requires_grad);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }
  Tensor& grad_mut(Var v) { return nodes_[v.id].grad; }

  // elementwise
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var add_scalar(Var a, double c);
  Var mul_scalar(Var a, double c);
  Var sin_(Var a);
  Var cos_(Var a);
  Var exp_(Var a);
  Var abs_(Var a);
  Var square(Var a);
  Var pow_const(Var a, double p);
  Var relu(Var a);
  Var sigmoid(Var a);

  // linear algebra
  Var matmul(Var a, Var b);                // [N,K] x [K,M] -> [N,M]
  Var add_rowvec(Var a, Var bias);         // [N,M] + [M]
  Var concat_cols(const std::vector<Var>& parts);

  // reductions
  Var sum(Var a);
  Var mean(Var a);

  // out[n,f] = sum_k w[n,k] * table[idx[n,k], f]; w and idx are fixed.
  Var gather_weighted(Var table, IndexMatPtr idx, std::shared_ptr<const Tensor> w);

  // Segmented sum over rows of a column vector: out[r] = sum over
  // [offsets[r], offsets[r+1]) of v. Used to accumulate ray integrals.
  Var segment_sum(Var v, std::shared_ptr<const std::vector<int64_t>> offsets);

  // Escape hatch for fused ops with hand-written backward (splat rendering).
  // `back` runs once during the backward sweep; it reads grad(out) and
  // accumulates into grad_accum(parent) for each parent it differentiates.
  Var custom(Tensor value, const std::vector<Var>& parents,
             std::function<void(Tape&, Var)> back);
  Tensor& grad_accum(Var v) { return acc(v); }
  bool requires_grad(Var v) const { return nodes_[v.id].needs_grad; }

  // scalar losses
  Var mse(Var pred, std::shared_ptr<const Tensor> target);
  // Anisotropic TV over a d-dimensional lattice stored row-major in `grid`.
  Var tv(Var grid, std::vector<int64_t> lattice_shape);

  void backward(Var loss);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    std::function<void(Tape&)> back;  // empty for leaves
  };

  Var push(Tensor value, bool needs_grad, std::function<void(Tape&)> back);
  Tensor& acc(Var v);  // grad buffer, allocated on demand

  std::vector<Node> nodes_;
};

}  // namespace inrb::ad
