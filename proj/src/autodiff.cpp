#include "inrbench/autodiff.hpp"

#include <cmath>

namespace inrb::ad {

Var Tape::push(Tensor value, bool needs_grad, std::function<void(Tape&)> back) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

Tensor& Tape::acc(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.data.empty()) n.grad = Tensor::zeros(n.value.shape);
  return n.grad;
}

namespace {
inline bool has_grad(const Tensor& g) { return !g.data.empty(); }
}  // namespace

Var Tape::add(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (!A.same_shape(B))
    throw BuildError("add: shape mismatch " + shape_str(A) + " vs " + shape_str(B));
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = A.data[i] + B.data[i];
  bool ng = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a, b](Tape& t) {
      const Tensor& g = t.grad(o);
      if (t.nodes_[a.id].needs_grad) {
        Tensor& ga = t.acc(a);
        for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i];
      }
      if (t.nodes_[b.id].needs_grad) {
        Tensor& gb = t.acc(b);
        for (int64_t i = 0; i < g.numel(); ++i) gb.data[i] += g.data[i];
      }
    };
  return o;
}

Var Tape::sub(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (!A.same_shape(B)) throw BuildError("sub: shape mismatch");
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = A.data[i] - B.data[i];
  bool ng = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a, b](Tape& t) {
      const Tensor& g = t.grad(o);
      if (t.nodes_[a.id].needs_grad) {
        Tensor& ga = t.acc(a);
        for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i];
      }
      if (t.nodes_[b.id].needs_grad) {
        Tensor& gb = t.acc(b);
        for (int64_t i = 0; i < g.numel(); ++i) gb.data[i] -= g.data[i];
      }
    };
  return o;
}

Var Tape::mul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (!A.same_shape(B)) throw BuildError("mul: shape mismatch");
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = A.data[i] * B.data[i];
  bool ng = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a, b](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& A = t.value(a);
      const Tensor& B = t.value(b);
      if (t.nodes_[a.id].needs_grad) {
        Tensor& ga = t.acc(a);
        for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i] * B.data[i];
      }
      if (t.nodes_[b.id].needs_grad) {
        Tensor& gb = t.acc(b);
        for (int64_t i = 0; i < g.numel(); ++i) gb.data[i] += g.data[i] * A.data[i];
      }
    };
  return o;
}

Var Tape::add_scalar(Var a, double c) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = A.data[i] + c;
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a](Tape& t) {
      const Tensor& g = t.grad(o);
      Tensor& ga = t.acc(a);
      for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i];
    };
  return o;
}

Var Tape::mul_scalar(Var a, double c) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = A.data[i] * c;
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a, c](Tape& t) {
      const Tensor& g = t.grad(o);
      Tensor& ga = t.acc(a);
      for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i] * c;
    };
  return o;
}

Var Tape::sin_(Var a) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = std::sin(A.data[i]);
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& A = t.value(a);
      Tensor& ga = t.acc(a);
      for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i] * std::cos(A.data[i]);
    };
  return o;
}

Var Tape::cos_(Var a) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = std::cos(A.data[i]);
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& A = t.value(a);
      Tensor& ga = t.acc(a);
      for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] -= g.data[i] * std::sin(A.data[i]);
    };
  return o;
}

Var Tape::exp_(Var a) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = std::exp(A.data[i]);
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& O = t.value(o);
      Tensor& ga = t.acc(a);
      for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i] * O.data[i];
    };
  return o;
}

Var Tape::abs_(Var a) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = std::fabs(A.data[i]);
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& A = t.value(a);
      Tensor& ga = t.acc(a);
      // subgradient with sign(0) = 0
      for (int64_t i = 0; i < g.numel(); ++i) {
        const double s = A.data[i] > 0.0 ? 1.0 : (A.data[i] < 0.0 ? -1.0 : 0.0);
        ga.data[i] += g.data[i] * s;
      }
    };
  return o;
}

Var Tape::square(Var a) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = A.data[i] * A.data[i];
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& A = t.value(a);
      Tensor& ga = t.acc(a);
      for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i] * 2.0 * A.data[i];
    };
  return o;
}

Var Tape::pow_const(Var a, double p) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = std::pow(A.data[i], p);
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a, p](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& A = t.value(a);
      Tensor& ga = t.acc(a);
      for (int64_t i = 0; i < g.numel(); ++i)
        ga.data[i] += g.data[i] * p * std::pow(A.data[i], p - 1.0);
    };
  return o;
}

Var Tape::relu(Var a) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = A.data[i] > 0.0 ? A.data[i] : 0.0;
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& A = t.value(a);
      Tensor& ga = t.acc(a);
      for (int64_t i = 0; i < g.numel(); ++i)
        if (A.data[i] > 0.0) ga.data[i] += g.data[i];
    };
  return o;
}

Var Tape::sigmoid(Var a) {
  const Tensor& A = value(a);
  Tensor out(A.shape);
  for (int64_t i = 0; i < A.numel(); ++i) out.data[i] = 1.0 / (1.0 + std::exp(-A.data[i]));
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& O = t.value(o);
      Tensor& ga = t.acc(a);
      for (int64_t i = 0; i < g.numel(); ++i)
        ga.data[i] += g.data[i] * O.data[i] * (1.0 - O.data[i]);
    };
  return o;
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.shape.size() != 2 || B.shape.size() != 2 || A.shape[1] != B.shape[0])
    throw BuildError("matmul: incompatible shapes " + shape_str(A) + " x " + shape_str(B));
  const int64_t N = A.shape[0], K = A.shape[1], M = B.shape[1];
  Tensor out({N, M});
  for (int64_t i = 0; i < N; ++i) {
    const double* arow = &A.data[static_cast<size_t>(i * K)];
    double* orow = &out.data[static_cast<size_t>(i * M)];
    for (int64_t k = 0; k < K; ++k) {
      const double av = arow[k];
      const double* brow = &B.data[static_cast<size_t>(k * M)];
      for (int64_t j = 0; j < M; ++j) orow[j] += av * brow[j];
    }
  }
  bool ng = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a, b, N, K, M](Tape& t) {
      const Tensor& g = t.grad(o);
      const Tensor& A = t.value(a);
      const Tensor& B = t.value(b);
      if (t.nodes_[a.id].needs_grad) {
        // dA = g @ B^T
        Tensor& ga = t.acc(a);
        for (int64_t i = 0; i < N; ++i) {
          const double* grow = &g.data[static_cast<size_t>(i * M)];
          double* garow = &ga.data[static_cast<size_t>(i * K)];
          for (int64_t k = 0; k < K; ++k) {
            const double* brow = &B.data[static_cast<size_t>(k * M)];
            double s = 0.0;
            for (int64_t j = 0; j < M; ++j) s += grow[j] * brow[j];
            garow[k] += s;
          }
        }
      }
      if (t.nodes_[b.id].needs_grad) {
        // dB = A^T @ g
        Tensor& gb = t.acc(b);
        for (int64_t i = 0; i < N; ++i) {
          const double* arow = &A.data[static_cast<size_t>(i * K)];
          const double* grow = &g.data[static_cast<size_t>(i * M)];
          for (int64_t k = 0; k < K; ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            double* gbrow = &gb.data[static_cast<size_t>(k * M)];
            for (int64_t j = 0; j < M; ++j) gbrow[j] += av * grow[j];
          }
        }
      }
    };
  return o;
}

Var Tape::add_rowvec(Var a, Var bias) {
  const Tensor& A = value(a);
  const Tensor& B = value(bias);
  if (A.shape.size() != 2 || B.numel() != A.shape[1])
    throw BuildError("add_rowvec: shape mismatch");
  const int64_t N = A.shape[0], M = A.shape[1];
  Tensor out({N, M});
  for (int64_t i = 0; i < N; ++i)
    for (int64_t j = 0; j < M; ++j)
      out.data[static_cast<size_t>(i * M + j)] =
          A.data[static_cast<size_t>(i * M + j)] + B.data[static_cast<size_t>(j)];
  bool ng = nodes_[a.id].needs_grad || nodes_[bias.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a, bias, N, M](Tape& t) {
      const Tensor& g = t.grad(o);
      if (t.nodes_[a.id].needs_grad) {
        Tensor& ga = t.acc(a);
        for (int64_t i = 0; i < g.numel(); ++i) ga.data[i] += g.data[i];
      }
      if (t.nodes_[bias.id].needs_grad) {
        Tensor& gb = t.acc(bias);
        for (int64_t i = 0; i < N; ++i)
          for (int64_t j = 0; j < M; ++j)
            gb.data[static_cast<size_t>(j)] += g.data[static_cast<size_t>(i * M + j)];
      }
    };
  return o;
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw BuildError("concat_cols: empty");
  const int64_t N = value(parts[0]).shape[0];
  int64_t M = 0;
  bool ng = false;
  for (Var p : parts) {
    const Tensor& T = value(p);
    if (T.shape.size() != 2 || T.shape[0] != N) throw BuildError("concat_cols: shape mismatch");
    M += T.shape[1];
    ng = ng || nodes_[p.id].needs_grad;
  }
  Tensor out({N, M});
  int64_t col = 0;
  for (Var p : parts) {
    const Tensor& T = value(p);
    const int64_t m = T.shape[1];
    for (int64_t i = 0; i < N; ++i)
      for (int64_t j = 0; j < m; ++j)
        out.data[static_cast<size_t>(i * M + col + j)] = T.data[static_cast<size_t>(i * m + j)];
    col += m;
  }
  Var o = push(std::move(out), ng, nullptr);
  if (ng) {
    std::vector<Var> ps = parts;
    nodes_[o.id].back = [o, ps, N, M](Tape& t) {
      const Tensor& g = t.grad(o);
      int64_t col = 0;
      for (Var p : ps) {
        const int64_t m = t.value(p).shape[1];
        if (t.nodes_[p.id].needs_grad) {
          Tensor& gp = t.acc(p);
          for (int64_t i = 0; i < N; ++i)
            for (int64_t j = 0; j < m; ++j)
              gp.data[static_cast<size_t>(i * m + j)] +=
                  g.data[static_cast<size_t>(i * M + col + j)];
        }
        col += m;
      }
    };
  }
  return o;
}

Var Tape::sum(Var a) {
  const Tensor& A = value(a);
  double s = 0.0;
  for (double v : A.data) s += v;
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(Tensor::scalar(s), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a](Tape& t) {
      const double g = t.grad(o).data[0];
      Tensor& ga = t.acc(a);
      for (double& v : ga.data) v += g;
    };
  return o;
}

Var Tape::mean(Var a) {
  const Tensor& A = value(a);
  double s = 0.0;
  for (double v : A.data) s += v;
  const double inv = 1.0 / static_cast<double>(A.numel());
  bool ng = nodes_[a.id].needs_grad;
  Var o = push(Tensor::scalar(s * inv), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, a, inv](Tape& t) {
      const double g = t.grad(o).data[0] * inv;
      Tensor& ga = t.acc(a);
      for (double& v : ga.data) v += g;
    };
  return o;
}

Var Tape::gather_weighted(Var table, IndexMatPtr idx, std::shared_ptr<const Tensor> w) {
  const Tensor& T = value(table);
  if (T.shape.size() != 2) throw BuildError("gather_weighted: table must be 2D");
  const int64_t F = T.shape[1];
  const int64_t N = idx->rows, K = idx->cols;
  if (w->shape.size() != 2 || w->shape[0] != N || w->shape[1] != K)
    throw BuildError("gather_weighted: weight shape mismatch");
  Tensor out({N, F});
  for (int64_t n = 0; n < N; ++n) {
    double* orow = &out.data[static_cast<size_t>(n * F)];
    for (int64_t k = 0; k < K; ++k) {
      const double wk = w->data[static_cast<size_t>(n * K + k)];
      const int64_t r = idx->at(n, k);
      const double* trow = &T.data[static_cast<size_t>(r * F)];
      for (int64_t f = 0; f < F; ++f) orow[f] += wk * trow[f];
    }
  }
  bool ng = nodes_[table.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, table, idx, w, N, K, F](Tape& t) {
      const Tensor& g = t.grad(o);
      Tensor& gt = t.acc(table);
      for (int64_t n = 0; n < N; ++n) {
        const double* grow = &g.data[static_cast<size_t>(n * F)];
        for (int64_t k = 0; k < K; ++k) {
          const double wk = w->data[static_cast<size_t>(n * K + k)];
          if (wk == 0.0) continue;
          const int64_t r = idx->at(n, k);
          double* trow = &gt.data[static_cast<size_t>(r * F)];
          for (int64_t f = 0; f < F; ++f) trow[f] += wk * grow[f];
        }
      }
    };
  return o;
}

Var Tape::segment_sum(Var v, std::shared_ptr<const std::vector<int64_t>> offsets) {
  const Tensor& V = value(v);
  const int64_t R = static_cast<int64_t>(offsets->size()) - 1;
  Tensor out({R, 1});
  for (int64_t r = 0; r < R; ++r) {
    double s = 0.0;
    for (int64_t i = (*offsets)[r]; i < (*offsets)[r + 1]; ++i)
      s += V.data[static_cast<size_t>(i)];
    out.data[static_cast<size_t>(r)] = s;
  }
  bool ng = nodes_[v.id].needs_grad;
  Var o = push(std::move(out), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, v, offsets, R](Tape& t) {
      const Tensor& g = t.grad(o);
      Tensor& gv = t.acc(v);
      for (int64_t r = 0; r < R; ++r) {
        const double gr = g.data[static_cast<size_t>(r)];
        for (int64_t i = (*offsets)[r]; i < (*offsets)[r + 1]; ++i)
          gv.data[static_cast<size_t>(i)] += gr;
      }
    };
  return o;
}

Var Tape::custom(Tensor value, const std::vector<Var>& parents,
                 std::function<void(Tape&, Var)> back) {
  bool ng = false;
  for (Var p : parents) ng = ng || nodes_[p.id].needs_grad;
  Var o = push(std::move(value), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, back](Tape& t) { back(t, o); };
  return o;
}

Var Tape::mse(Var pred, std::shared_ptr<const Tensor> target) {
  const Tensor& P = value(pred);
  if (!P.same_shape(*target)) throw BuildError("mse: shape mismatch");
  double s = 0.0;
  for (int64_t i = 0; i < P.numel(); ++i) {
    const double d = P.data[i] - target->data[i];
    s += d * d;
  }
  const double inv = 1.0 / static_cast<double>(P.numel());
  bool ng = nodes_[pred.id].needs_grad;
  Var o = push(Tensor::scalar(s * inv), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, pred, target, inv](Tape& t) {
      const double g = t.grad(o).data[0];
      const Tensor& P = t.value(pred);
      Tensor& gp = t.acc(pred);
      for (int64_t i = 0; i < P.numel(); ++i)
        gp.data[i] += g * 2.0 * inv * (P.data[i] - target->data[i]);
    };
  return o;
}

Var Tape::tv(Var grid, std::vector<int64_t> lattice_shape) {
  const Tensor& G = value(grid);
  if (Tensor::numel_of(lattice_shape) != G.numel())
    throw BuildError("tv: lattice shape does not cover grid");
  const int d = static_cast<int>(lattice_shape.size());
  std::vector<int64_t> stride(d, 1);
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * lattice_shape[a + 1];
  double total = 0.0;
  std::vector<int64_t> counts(d, 0);
  for (int axis = 0; axis < d; ++axis) {
    const int64_t ext = lattice_shape[axis];
    if (ext < 2) continue;  // degenerate axis contributes 0
    const int64_t st = stride[axis];
    double s = 0.0;
    int64_t count = 0;
    const int64_t n = G.numel();
    for (int64_t i = 0; i < n; ++i) {
      const int64_t pos = (i / st) % ext;
      if (pos == ext - 1) continue;
      s += std::fabs(G.data[static_cast<size_t>(i + st)] - G.data[static_cast<size_t>(i)]);
      ++count;
    }
    counts[axis] = count;
    total += s / static_cast<double>(count);
  }
  bool ng = nodes_[grid.id].needs_grad;
  Var o = push(Tensor::scalar(total), ng, nullptr);
  if (ng)
    nodes_[o.id].back = [o, grid, lattice_shape, stride, counts, d](Tape& t) {
      const double g = t.grad(o).data[0];
      const Tensor& G = t.value(grid);
      Tensor& gg = t.acc(grid);
      const int64_t n = G.numel();
      for (int axis = 0; axis < d; ++axis) {
        const int64_t ext = lattice_shape[axis];
        if (ext < 2) continue;
        const int64_t st = stride[axis];
        const double scale = g / static_cast<double>(counts[axis]);
        for (int64_t i = 0; i < n; ++i) {
          const int64_t pos = (i / st) % ext;
          if (pos == ext - 1) continue;
          const double diff =
              G.data[static_cast<size_t>(i + st)] - G.data[static_cast<size_t>(i)];
          const double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
          gg.data[static_cast<size_t>(i + st)] += scale * s;
          gg.data[static_cast<size_t>(i)] -= scale * s;
        }
      }
    };
  return o;
}

void Tape::backward(Var loss) {
  if (value(loss).numel() != 1) throw BuildError("backward: loss must be scalar");
  acc(loss).data[0] = 1.0;
  for (int64_t i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (!n.needs_grad || !n.back) continue;
    if (!has_grad(n.grad)) continue;  // never contributed to the loss
    n.back(*this);
  }
}

}  // namespace inrb::ad
