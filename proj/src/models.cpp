#include "inrbench/model.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "inrbench/budget.hpp"
#include "inrbench/errors.hpp"
#include "inrbench/gsplat.hpp"
#include "inrbench/interp.hpp"
#include "inrbench/rng.hpp"
#include "inrbench/signal.hpp"

namespace inrb {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

struct Taps {
  ad::IndexMatPtr idx;
  std::shared_ptr<const Tensor> w;
};

// 16-tap bicubic over a side x side lattice; coords [B,2] as (row, col).
Taps bicubic_taps_2d(const Tensor& coords, int64_t side) {
  const int64_t b = coords.rows();
  auto im = std::make_shared<ad::IndexMat>();
  im->rows = b;
  im->cols = 16;
  im->idx.resize(static_cast<size_t>(b * 16));
  auto w = std::make_shared<Tensor>(std::vector<int64_t>{b, 16});
  for (int64_t p = 0; p < b; ++p) {
    const CubicTaps ty = cubic_taps(to_index_space(coords.at2(p, 0), side), side);
    const CubicTaps tx = cubic_taps(to_index_space(coords.at2(p, 1), side), side);
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) {
        const int64_t k = a * 4 + c;
        im->idx[static_cast<size_t>(p * 16 + k)] = ty.idx[a] * side + tx.idx[c];
        w->at2(p, k) = ty.w[a] * tx.w[c];
      }
  }
  return {std::move(im), std::move(w)};
}

// 8-tap trilinear over a side^3 lattice; coords [B,3].
Taps trilinear_taps_3d(const Tensor& coords, int64_t side) {
  const int64_t b = coords.rows();
  auto im = std::make_shared<ad::IndexMat>();
  im->rows = b;
  im->cols = 8;
  im->idx.resize(static_cast<size_t>(b * 8));
  auto w = std::make_shared<Tensor>(std::vector<int64_t>{b, 8});
  for (int64_t p = 0; p < b; ++p) {
    const LinearTaps t0 = linear_taps(to_index_space(coords.at2(p, 0), side), side);
    const LinearTaps t1 = linear_taps(to_index_space(coords.at2(p, 1), side), side);
    const LinearTaps t2 = linear_taps(to_index_space(coords.at2(p, 2), side), side);
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          const int64_t k = a * 4 + c * 2 + d;
          im->idx[static_cast<size_t>(p * 8 + k)] =
              (t0.idx[a] * side + t1.idx[c]) * side + t2.idx[d];
          w->at2(p, k) = t0.w[a] * t1.w[c] * t2.w[d];
        }
  }
  return {std::move(im), std::move(w)};
}

// 2-tap linear interpolation of one coordinate axis on a length-res line.
Taps line_taps(const Tensor& coords, int axis, int64_t res) {
  const int64_t b = coords.rows();
  auto im = std::make_shared<ad::IndexMat>();
  im->rows = b;
  im->cols = 2;
  im->idx.resize(static_cast<size_t>(b * 2));
  auto w = std::make_shared<Tensor>(std::vector<int64_t>{b, 2});
  for (int64_t p = 0; p < b; ++p) {
    const LinearTaps t = linear_taps(to_index_space(coords.at2(p, axis), res), res);
    im->idx[static_cast<size_t>(p * 2)] = t.idx[0];
    im->idx[static_cast<size_t>(p * 2 + 1)] = t.idx[1];
    w->at2(p, 0) = t.w[0];
    w->at2(p, 1) = t.w[1];
  }
  return {std::move(im), std::move(w)};
}

// 4-tap bilinear over a res x res plane spanned by coordinate axes (a0, a1).
Taps plane_taps(const Tensor& coords, int a0, int a1, int64_t res) {
  const int64_t b = coords.rows();
  auto im = std::make_shared<ad::IndexMat>();
  im->rows = b;
  im->cols = 4;
  im->idx.resize(static_cast<size_t>(b * 4));
  auto w = std::make_shared<Tensor>(std::vector<int64_t>{b, 4});
  for (int64_t p = 0; p < b; ++p) {
    const LinearTaps t0 = linear_taps(to_index_space(coords.at2(p, a0), res), res);
    const LinearTaps t1 = linear_taps(to_index_space(coords.at2(p, a1), res), res);
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) {
        const int64_t k = a * 2 + c;
        im->idx[static_cast<size_t>(p * 4 + k)] = t0.idx[a] * res + t1.idx[c];
        w->at2(p, k) = t0.w[a] * t1.w[c];
      }
  }
  return {std::move(im), std::move(w)};
}

Tensor xavier_uniform(Rng& rng, int64_t fan_in, int64_t fan_out) {
  const double b = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return rng.uniform_tensor({fan_in, fan_out}, -b, b);
}

std::string i2s(int64_t v) { return std::to_string(v); }

// ------------------------------------------------------------------ grid

class GridModel final : public FieldModel {
 public:
  GridModel(int64_t P, int d_in, int d_out, uint64_t /*seed*/)
      : FieldModel(ModelKind::grid, d_in, d_out), side_(grid_side(P, d_in, d_out)) {
    int64_t cells = side_ * side_;
    if (d_in == 3) cells *= side_;
    params.push_back({"grid", Tensor::full({cells, d_out}, 0.5)});
  }
  explicit GridModel(int64_t side, int d_in, int d_out)
      : FieldModel(ModelKind::grid, d_in, d_out), side_(side) {
    int64_t cells = side_ * side_;
    if (d_in == 3) cells *= side_;
    params.push_back({"grid", Tensor::full({cells, d_out}, 0.5)});
  }

  ad::Var forward(ad::Tape& t, const std::vector<ad::Var>& vars,
                  const Tensor& coords) const override {
    Taps taps = d_in() == 2 ? bicubic_taps_2d(coords, side_)
                            : trilinear_taps_3d(coords, side_);
    return t.gather_weighted(vars[0], taps.idx, taps.w);
  }

  double default_lr() const override { return 1e-1; }

  std::vector<int64_t> tv_lattice() const override {
    std::vector<int64_t> shape(static_cast<size_t>(d_in()), side_);
    if (d_out() > 1) shape.push_back(d_out());
    return shape;
  }

  std::vector<std::pair<std::string, std::string>> knobs() const override {
    return {{"side", i2s(side_)}};
  }

  int64_t side() const { return side_; }

 private:
  int64_t side_;
};

// ------------------------------------------------------------------- ffn

class FfnModel final : public FieldModel {
 public:
  FfnModel(int64_t P, int d_in, int d_out, uint64_t seed)
      : FieldModel(ModelKind::ffn, d_in, d_out) {
    // m = 1000 at the published budgets; smaller budgets shrink the
    // embedding so a positive width exists.
    m_ = P >= 10000 ? 1000 : std::max<int64_t>(4, P / 10);
    int64_t width;
    if (m_ == 1000) {
      width = ffn_width(P, d_in, d_out);
    } else {
      ParameterBudget b;
      b.P = P;
      b.L = 2;
      b.d_in_or_enc = 2 * m_;
      b.d_in = d_in;
      b.d_out = d_out;
      b.params_enc = m_ * d_in + m_;
      width = solve_hidden_width(b);
    }
    Rng rng(seed);
    frozen.push_back({"omega", rng.normal_tensor({d_in, m_}, 0.0, sigma_)});
    frozen.push_back({"amp", Tensor::full({m_}, 1.0)});
    params.push_back({"w0", xavier_uniform(rng, 2 * m_, width)});
    params.push_back({"b0", Tensor::zeros({width})});
    params.push_back({"w1", xavier_uniform(rng, width, width)});
    params.push_back({"b1", Tensor::zeros({width})});
    params.push_back({"w2", xavier_uniform(rng, width, width)});
    params.push_back({"b2", Tensor::zeros({width})});
    params.push_back({"w3", xavier_uniform(rng, width, d_out)});
    params.push_back({"b3", Tensor::zeros({d_out})});
  }

  int64_t budget_charge() const override {
    return count_params() + m_ * d_in() + m_;  // frozen embedding is charged
  }

  ad::Var forward(ad::Tape& t, const std::vector<ad::Var>& vars,
                  const Tensor& coords) const override {
    ad::Var e = t.leaf(embedding(coords), false);
    ad::Var h = t.relu(t.add_rowvec(t.matmul(e, vars[0]), vars[1]));
    h = t.relu(t.add_rowvec(t.matmul(h, vars[2]), vars[3]));
    h = t.relu(t.add_rowvec(t.matmul(h, vars[4]), vars[5]));
    return t.add_rowvec(t.matmul(h, vars[6]), vars[7]);
  }

  double default_lr() const override { return 1e-3; }

  std::vector<std::pair<std::string, std::string>> knobs() const override {
    return {{"m", i2s(m_)}, {"width", i2s(params[0].value.cols())}};
  }

 private:
  // gamma(q) = [amp_j cos(2*pi q.omega_j), amp_j sin(2*pi q.omega_j)]
  Tensor embedding(const Tensor& coords) const {
    const int64_t b = coords.rows();
    if (cache_rows_ == b && cache_coords_ == coords.data) return cache_;
    const Tensor& omega = frozen[0].value;
    const Tensor& amp = frozen[1].value;
    Tensor e({b, 2 * m_});
    for (int64_t p = 0; p < b; ++p)
      for (int64_t j = 0; j < m_; ++j) {
        double dot = 0.0;
        for (int d = 0; d < d_in(); ++d)
          dot += coords.at2(p, d) * omega.at2(d, j);
        dot *= kTwoPi;
        e.at2(p, j) = amp.at(j) * std::cos(dot);
        e.at2(p, m_ + j) = amp.at(j) * std::sin(dot);
      }
    cache_coords_ = coords.data;
    cache_rows_ = b;
    cache_ = e;
    return e;
  }

  int64_t m_ = 1000;
  double sigma_ = 20.0;
  mutable std::vector<double> cache_coords_;
  mutable int64_t cache_rows_ = 0;
  mutable Tensor cache_;
};

// ----------------------------------------------------------------- siren

class SirenModel final : public FieldModel {
 public:
  SirenModel(int64_t P, int d_in, int d_out, uint64_t seed)
      : FieldModel(ModelKind::siren, d_in, d_out) {
    const int64_t x = siren_width(P, d_in, d_out);
    Rng rng(seed);
    const double hb = std::sqrt(6.0 / static_cast<double>(x)) / omega_;
    params.push_back({"w0", rng.uniform_tensor({d_in, x}, -1.0 / d_in, 1.0 / d_in)});
    params.push_back({"b0", Tensor::zeros({x})});
    for (int l = 1; l <= 3; ++l) {
      params.push_back({"w" + std::to_string(l), rng.uniform_tensor({x, x}, -hb, hb)});
      params.push_back({"b" + std::to_string(l), Tensor::zeros({x})});
    }
    params.push_back({"wout", rng.uniform_tensor({x, d_out}, -hb, hb)});
    params.push_back({"bout", Tensor::zeros({d_out})});
  }

  ad::Var forward(ad::Tape& t, const std::vector<ad::Var>& vars,
                  const Tensor& coords) const override {
    ad::Var q = t.leaf(coords, false);
    ad::Var h = t.sin_(t.mul_scalar(t.add_rowvec(t.matmul(q, vars[0]), vars[1]), omega_));
    for (int l = 1; l <= 3; ++l)
      h = t.sin_(t.mul_scalar(
          t.add_rowvec(t.matmul(h, vars[static_cast<size_t>(2 * l)]),
                       vars[static_cast<size_t>(2 * l + 1)]),
          omega_));
    return t.add_rowvec(t.matmul(h, vars[8]), vars[9]);
  }

  double default_lr() const override { return 1e-4; }

  std::vector<std::pair<std::string, std::string>> knobs() const override {
    return {{"width", i2s(params[0].value.cols())}};
  }

 private:
  double omega_ = 90.0;
};

// ------------------------------------------------------------------ wire

class WireModel final : public FieldModel {
 public:
  WireModel(int64_t P, int d_in, int d_out, uint64_t seed)
      : FieldModel(ModelKind::wire, d_in, d_out) {
    const int64_t x = wire_width(P, d_in, d_out);
    Rng rng(seed);
    const double fb = 1.0 / d_in;
    const double hb = std::sqrt(6.0 / static_cast<double>(x)) / omega_;
    auto cl = [&](const std::string& n, int64_t in, int64_t out, double bound) {
      params.push_back({n + "r", rng.uniform_tensor({in, out}, -bound, bound)});
      params.push_back({n + "i", rng.uniform_tensor({in, out}, -bound, bound)});
      params.push_back({n + "br", Tensor::zeros({out})});
      params.push_back({n + "bi", Tensor::zeros({out})});
    };
    cl("w0", d_in, x, fb);
    cl("w1", x, x, hb);
    cl("w2", x, x, hb);
    cl("wo", x, d_out, hb);
  }

  ad::Var forward(ad::Tape& t, const std::vector<ad::Var>& vars,
                  const Tensor& coords) const override {
    ad::Var q = t.leaf(coords, false);
    // input layer: real input through complex weights
    ad::Var u = t.add_rowvec(t.matmul(q, vars[0]), vars[2]);
    ad::Var v = t.add_rowvec(t.matmul(q, vars[1]), vars[3]);
    auto act = [&](ad::Var& ur, ad::Var& vi) {
      // psi(u+iv) = exp(-omega v - s^2 (u^2+v^2)) (cos(omega u) + i sin(omega u))
      ad::Var mag = t.add(t.square(ur), t.square(vi));
      ad::Var env = t.exp_(t.sub(t.mul_scalar(vi, -omega_),
                                 t.mul_scalar(mag, s_ * s_)));
      ad::Var phase = t.mul_scalar(ur, omega_);
      ad::Var nu = t.mul(env, t.cos_(phase));
      ad::Var nv = t.mul(env, t.sin_(phase));
      ur = nu;
      vi = nv;
    };
    act(u, v);
    for (int l = 1; l <= 2; ++l) {
      const size_t o = static_cast<size_t>(4 * l);
      ad::Var nu = t.add_rowvec(
          t.sub(t.matmul(u, vars[o]), t.matmul(v, vars[o + 1])), vars[o + 2]);
      ad::Var nv = t.add_rowvec(
          t.add(t.matmul(u, vars[o + 1]), t.matmul(v, vars[o])), vars[o + 3]);
      u = nu;
      v = nv;
      act(u, v);
    }
    // output: real part of the complex head (its imaginary bias is inert
    // but kept for the published parameter accounting)
    return t.add_rowvec(t.sub(t.matmul(u, vars[12]), t.matmul(v, vars[13])),
                        vars[14]);
  }

  double default_lr() const override { return 5e-4; }

  std::vector<std::pair<std::string, std::string>> knobs() const override {
    return {{"width", i2s(params[0].value.cols())}};
  }

 private:
  double omega_ = 15.0;
  double s_ = 10.0;
};

// -------------------------------------------------------------- gaplanes

class GaplanesModel final : public FieldModel {
 public:
  GaplanesModel(int64_t P, int d_in, int d_out, int64_t signal_res, uint64_t seed)
      : FieldModel(ModelKind::gaplanes, d_in, d_out) {
    if (d_in == 2) {
      // published sizing: lines at signal resolution with a 20^2 plane,
      // except the smallest budget which shrinks both (550 / 11 at res 1000)
      line_res_ = P == 10000 ? std::max<int64_t>(2, std::llround(0.55 * signal_res))
                             : signal_res;
      plane_res_ = std::min<int64_t>(P == 10000 ? 11 : 20, line_res_);
    } else {
      line_res_ = signal_res;
      plane_res_ = std::min<int64_t>(20, signal_res);
      vol_res_ = std::min<int64_t>(5, signal_res);
    }
    const int64_t f =
        gaplanes_feature_dim(P, d_in, d_out, line_res_, plane_res_, vol_res_);
    Rng rng(seed);
    auto grid = [&](const std::string& n, int64_t rows) {
      params.push_back({n, rng.uniform_tensor({rows, f}, -0.5, 0.5)});
    };
    for (int a = 0; a < d_in; ++a) grid("line" + std::to_string(a), line_res_);
    if (d_in == 2) {
      grid("plane01", plane_res_ * plane_res_);
    } else {
      grid("plane01", plane_res_ * plane_res_);
      grid("plane02", plane_res_ * plane_res_);
      grid("plane12", plane_res_ * plane_res_);
      grid("volume", vol_res_ * vol_res_ * vol_res_);
    }
    params.push_back({"w1", xavier_uniform(rng, f, f)});
    params.push_back({"b1", Tensor::zeros({f})});
    params.push_back({"w2", xavier_uniform(rng, f, d_out)});
    params.push_back({"b2", Tensor::zeros({d_out})});
  }

  ad::Var forward(ad::Tape& t, const std::vector<ad::Var>& vars,
                  const Tensor& coords) const override {
    ad::Var feat;
    size_t o;
    if (d_in() == 2) {
      Taps l0 = line_taps(coords, 0, line_res_);
      Taps l1 = line_taps(coords, 1, line_res_);
      Taps pl = plane_taps(coords, 0, 1, plane_res_);
      feat = t.add(t.mul(t.gather_weighted(vars[0], l0.idx, l0.w),
                         t.gather_weighted(vars[1], l1.idx, l1.w)),
                   t.gather_weighted(vars[2], pl.idx, pl.w));
      o = 3;
    } else {
      Taps lt[3] = {line_taps(coords, 0, line_res_), line_taps(coords, 1, line_res_),
                    line_taps(coords, 2, line_res_)};
      Taps pt01 = plane_taps(coords, 0, 1, plane_res_);
      Taps pt02 = plane_taps(coords, 0, 2, plane_res_);
      Taps pt12 = plane_taps(coords, 1, 2, plane_res_);
      Taps vt = trilinear_taps_3d(coords, vol_res_);
      ad::Var l0 = t.gather_weighted(vars[0], lt[0].idx, lt[0].w);
      ad::Var l1 = t.gather_weighted(vars[1], lt[1].idx, lt[1].w);
      ad::Var l2 = t.gather_weighted(vars[2], lt[2].idx, lt[2].w);
      ad::Var p01 = t.gather_weighted(vars[3], pt01.idx, pt01.w);
      ad::Var p02 = t.gather_weighted(vars[4], pt02.idx, pt02.w);
      ad::Var p12 = t.gather_weighted(vars[5], pt12.idx, pt12.w);
      ad::Var vol = t.gather_weighted(vars[6], vt.idx, vt.w);
      feat = t.add(t.mul(t.mul(l0, l1), l2),
                   t.add(t.add(t.mul(l2, p01), t.mul(l1, p02)),
                         t.add(t.mul(l0, p12), vol)));
      o = 7;
    }
    ad::Var h = t.relu(t.add_rowvec(t.matmul(feat, vars[o]), vars[o + 1]));
    return t.add_rowvec(t.matmul(h, vars[o + 2]), vars[o + 3]);
  }

  double default_lr() const override { return 1e-2; }

  std::vector<std::pair<std::string, std::string>> knobs() const override {
    return {{"line_res", i2s(line_res_)},
            {"plane_res", i2s(plane_res_)},
            {"vol_res", i2s(vol_res_)},
            {"features", i2s(params[0].value.cols())}};
  }

 private:
  int64_t line_res_ = 0, plane_res_ = 0, vol_res_ = 0;
};

// -------------------------------------------------------------- hashgrid

class HashgridModel final : public FieldModel {
 public:
  HashgridModel(int64_t P, int d_in, int d_out, int64_t signal_res, uint64_t seed)
      : FieldModel(ModelKind::hashgrid, d_in, d_out) {
    log2_table_ = static_cast<int>(hash_log2_table(P, d_out));
    n_min_ = std::min<int64_t>(16, signal_res);
    n_max_ = std::max<int64_t>(signal_res, n_min_ + 1);
    Rng rng(seed);
    const int64_t tlen = int64_t{kLevels} << log2_table_;
    params.push_back({"table", rng.uniform_tensor({tlen, kFeat}, -1e-4, 1e-4)});
    params.push_back({"w1", xavier_uniform(rng, kLevels * kFeat, 64)});
    params.push_back({"b1", Tensor::zeros({64})});
    params.push_back({"w2", xavier_uniform(rng, 64, d_out)});
    params.push_back({"b2", Tensor::zeros({d_out})});
  }

  ad::Var forward(ad::Tape& t, const std::vector<ad::Var>& vars,
                  const Tensor& coords) const override {
    std::vector<ad::Var> feats;
    feats.reserve(kLevels);
    for (int l = 0; l < kLevels; ++l) {
      Taps taps = level_taps(coords, l);
      feats.push_back(t.gather_weighted(vars[0], taps.idx, taps.w));
    }
    ad::Var h = t.relu(t.add_rowvec(t.matmul(t.concat_cols(feats), vars[1]), vars[2]));
    return t.add_rowvec(t.matmul(h, vars[3]), vars[4]);
  }

  double default_lr() const override { return 1e-2; }

  std::vector<std::pair<std::string, std::string>> knobs() const override {
    return {{"log2_table", i2s(log2_table_)},
            {"n_min", i2s(n_min_)},
            {"n_max", i2s(n_max_)}};
  }

 private:
  static constexpr int kLevels = 16;
  static constexpr int64_t kFeat = 2;
  static constexpr uint64_t kPrimes[3] = {1ull, 2654435761ull, 805459861ull};

  int64_t level_res(int l) const {
    const double g = std::exp((std::log(static_cast<double>(n_max_)) -
                               std::log(static_cast<double>(n_min_))) /
                              (kLevels - 1));
    return std::max<int64_t>(
        1, std::llround(static_cast<double>(n_min_) * std::pow(g, l)));
  }

  Taps level_taps(const Tensor& coords, int l) const {
    const int64_t res = level_res(l);
    const int64_t tsize = int64_t{1} << log2_table_;
    const int64_t offset = int64_t{l} << log2_table_;
    const int d = d_in();
    const int corners = 1 << d;
    int64_t vertices = res + 1;
    bool injective = true;
    int64_t vol = 1;
    for (int a = 0; a < d; ++a) {
      vol *= vertices;
      if (vol > tsize) {
        injective = false;
        break;
      }
    }
    const int64_t b = coords.rows();
    auto im = std::make_shared<ad::IndexMat>();
    im->rows = b;
    im->cols = corners;
    im->idx.resize(static_cast<size_t>(b * corners));
    auto w = std::make_shared<Tensor>(std::vector<int64_t>{b, corners});
    for (int64_t p = 0; p < b; ++p) {
      int64_t base[3] = {0, 0, 0};
      double frac[3] = {0, 0, 0};
      for (int a = 0; a < d; ++a) {
        double u = (coords.at2(p, a) + 1.0) * 0.5 * static_cast<double>(res);
        u = std::max(0.0, std::min(u, static_cast<double>(res) - 1e-9));
        const double f = std::floor(u);
        base[a] = static_cast<int64_t>(f);
        frac[a] = u - f;
      }
      for (int c = 0; c < corners; ++c) {
        uint64_t hash = 0;
        int64_t linear = 0;
        double weight = 1.0;
        for (int a = 0; a < d; ++a) {
          const int bit = (c >> (d - 1 - a)) & 1;
          const int64_t v = base[a] + bit;
          weight *= bit ? frac[a] : 1.0 - frac[a];
          hash ^= static_cast<uint64_t>(v) * kPrimes[a];
          linear = linear * vertices + v;
        }
        const int64_t entry = injective
                                  ? linear
                                  : static_cast<int64_t>(hash & (static_cast<uint64_t>(tsize) - 1));
        im->idx[static_cast<size_t>(p * corners + c)] = offset + entry;
        w->at2(p, c) = weight;
      }
    }
    return {std::move(im), std::move(w)};
  }

  int log2_table_ = 0;
  int64_t n_min_ = 16, n_max_ = 16;
};

// -------------------------------------------------------------- gsplat2d

class GsplatModel final : public FieldModel {
 public:
  GsplatModel(int64_t P, int d_in, int d_out, uint64_t seed)
      : FieldModel(ModelKind::gsplat2d, d_in, d_out) {
    if (d_in != 2) throw Unsupported("gsplat2d supports 2D signals only");
    const int64_t n = gsplat_count(P, d_out);
    Rng rng(seed);
    const double sigma0 = 2.0 / std::sqrt(static_cast<double>(n));
    params.push_back({"means", rng.uniform_tensor({n, 2}, -1.0, 1.0)});
    Tensor chol({n, 3});
    for (int64_t i = 0; i < n; ++i) {
      chol.at2(i, 0) = -std::log(sigma0);
      chol.at2(i, 1) = -std::log(sigma0);
      chol.at2(i, 2) = 0.0;
    }
    params.push_back({"chol", std::move(chol)});
    params.push_back({"opacity", Tensor::zeros({n, 1})});
    params.push_back({"color", Tensor::full({n, d_out}, 0.5)});
  }

  int64_t budget_charge() const override {
    // published accounting: 11 + C parameters per Gaussian
    const int64_t n = params[0].value.rows();
    return n * (11 + d_out());
  }

  ad::Var forward(ad::Tape& t, const std::vector<ad::Var>& vars,
                  const Tensor& coords) const override {
    return gsplat_render(t, vars[0], vars[1], vars[2], vars[3], coords);
  }

  double default_lr() const override { return 5e-2; }

  std::vector<std::pair<std::string, std::string>> knobs() const override {
    return {{"gaussians", i2s(params[0].value.rows())}};
  }
};

// ----------------------------------------------------------------- bacon

class BaconModel final : public FieldModel {
 public:
  BaconModel(int64_t P, int d_in, int d_out, int64_t signal_res, uint64_t seed)
      : FieldModel(ModelKind::bacon, d_in, d_out) {
    const int64_t x = bacon_width(P, d_in, d_out);
    band_per_layer_ = std::max<int64_t>(1, signal_res / 8);  // Nyquist / 4
    Rng rng(seed);
    for (int l = 0; l < 4; ++l) {
      Tensor fr({x, d_in});
      for (double& v : fr.data)
        v = static_cast<double>(rng.uniform_int(2 * band_per_layer_ + 1) -
                                band_per_layer_);
      frozen.push_back({"freq" + std::to_string(l), std::move(fr)});
      frozen.push_back({"phase" + std::to_string(l),
                        rng.uniform_tensor({x}, 0.0, kTwoPi)});
    }
    for (int l = 1; l <= 3; ++l) {
      params.push_back({"w" + std::to_string(l), xavier_uniform(rng, x, x)});
      params.push_back({"b" + std::to_string(l), Tensor::zeros({x})});
    }
    params.push_back({"wout", xavier_uniform(rng, x, d_out)});
    params.push_back({"bout", Tensor::zeros({d_out})});
  }

  // Highest frequency (cycles per domain) any output component can contain.
  int64_t cumulative_band() const { return 4 * band_per_layer_; }

  ad::Var forward(ad::Tape& t, const std::vector<ad::Var>& vars,
                  const Tensor& coords) const override {
    ad::Var z = t.leaf(filter(coords, 0), false);
    for (int l = 1; l <= 3; ++l) {
      ad::Var lin = t.add_rowvec(t.matmul(z, vars[static_cast<size_t>(2 * (l - 1))]),
                                 vars[static_cast<size_t>(2 * (l - 1) + 1)]);
      z = t.mul(lin, t.leaf(filter(coords, l), false));
    }
    return t.add_rowvec(t.matmul(z, vars[6]), vars[7]);
  }

  double default_lr() const override { return 5e-2; }

  std::vector<std::pair<std::string, std::string>> knobs() const override {
    return {{"width", i2s(params[0].value.rows())},
            {"band_per_layer", i2s(band_per_layer_)}};
  }

 private:
  // g_l(q) = sin(2*pi <f, q/2> + phi), with q/2 in [-0.5, 0.5)^d so integer
  // frequencies are exactly periodic over the domain.
  Tensor filter(const Tensor& coords, int l) const {
    const Tensor& fr = frozen[static_cast<size_t>(2 * l)].value;
    const Tensor& ph = frozen[static_cast<size_t>(2 * l + 1)].value;
    const int64_t b = coords.rows();
    const int64_t x = fr.rows();
    Tensor g({b, x});
    for (int64_t p = 0; p < b; ++p)
      for (int64_t j = 0; j < x; ++j) {
        double dot = 0.0;
        for (int d = 0; d < d_in(); ++d)
          dot += fr.at2(j, d) * coords.at2(p, d) * 0.5;
        g.at2(p, j) = std::sin(kTwoPi * dot + ph.at(j));
      }
    return g;
  }

  int64_t band_per_layer_ = 1;
};

}  // namespace

// ---------------------------------------------------------------- common

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::grid: return "grid";
    case ModelKind::ffn: return "ffn";
    case ModelKind::siren: return "siren";
    case ModelKind::wire: return "wire";
    case ModelKind::gaplanes: return "gaplanes";
    case ModelKind::hashgrid: return "hashgrid";
    case ModelKind::gsplat2d: return "gsplat2d";
    case ModelKind::bacon: return "bacon";
  }
  return "?";
}

ModelKind kind_from_name(const std::string& name) {
  static const std::pair<const char*, ModelKind> table[] = {
      {"grid", ModelKind::grid},         {"ffn", ModelKind::ffn},
      {"siren", ModelKind::siren},       {"wire", ModelKind::wire},
      {"gaplanes", ModelKind::gaplanes}, {"hashgrid", ModelKind::hashgrid},
      {"gsplat2d", ModelKind::gsplat2d}, {"bacon", ModelKind::bacon}};
  for (const auto& [n, k] : table)
    if (name == n) return k;
  throw ConfigError("unknown model kind: " + name);
}

int64_t FieldModel::count_params() const {
  int64_t n = 0;
  for (const NamedTensor& p : params) n += p.value.numel();
  return n;
}

Tensor FieldModel::evaluate(const Tensor& coords) const {
  const int64_t b = coords.rows();
  const int64_t chunk = 8192;
  Tensor out({b, d_out()});
  for (int64_t start = 0; start < b; start += chunk) {
    const int64_t rows = std::min(chunk, b - start);
    Tensor sub({rows, d_in()});
    std::copy(coords.data.begin() + start * d_in(),
              coords.data.begin() + (start + rows) * d_in(), sub.data.begin());
    ad::Tape t;
    std::vector<ad::Var> vars;
    vars.reserve(params.size());
    for (const NamedTensor& p : params) vars.push_back(t.leaf(p.value, false));
    const Tensor& v = t.value(forward(t, vars, sub));
    std::copy(v.data.begin(), v.data.end(), out.data.begin() + start * d_out());
  }
  if (!out.all_finite()) throw BuildError("model evaluation produced non-finite values");
  return out;
}

std::unique_ptr<FieldModel> make_model(ModelKind kind, int64_t budget, int d_in,
                                       int d_out, int64_t signal_res, uint64_t seed) {
  switch (kind) {
    case ModelKind::grid:
      return std::make_unique<GridModel>(budget, d_in, d_out, seed);
    case ModelKind::ffn:
      return std::make_unique<FfnModel>(budget, d_in, d_out, seed);
    case ModelKind::siren:
      return std::make_unique<SirenModel>(budget, d_in, d_out, seed);
    case ModelKind::wire:
      return std::make_unique<WireModel>(budget, d_in, d_out, seed);
    case ModelKind::gaplanes:
      return std::make_unique<GaplanesModel>(budget, d_in, d_out, signal_res, seed);
    case ModelKind::hashgrid:
      return std::make_unique<HashgridModel>(budget, d_in, d_out, signal_res, seed);
    case ModelKind::gsplat2d:
      return std::make_unique<GsplatModel>(budget, d_in, d_out, seed);
    case ModelKind::bacon:
      return std::make_unique<BaconModel>(budget, d_in, d_out, signal_res, seed);
  }
  throw BuildError("unreachable model kind");
}

// ------------------------------------------------------------ checkpoints

namespace {

void save_tensor(const Tensor& t, const std::string& path) {
  SampledSignal s;
  s.dim = 2;
  s.resolution = {t.numel(), 1};
  s.channels = 1;
  s.values = t.data;
  save_signal(s, path);
}

Tensor load_tensor(const std::string& path, const std::vector<int64_t>& shape) {
  SampledSignal s = load_signal(path);
  if (static_cast<int64_t>(s.values.size()) != Tensor::numel_of(shape))
    throw IoError("checkpoint tensor size mismatch: " + path);
  return Tensor(shape, s.values);
}

}  // namespace

void save_checkpoint(const FieldModel& m, int64_t budget, int64_t signal_res,
                     uint64_t seed, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json j;
  j["kind"] = kind_name(m.kind());
  j["budget"] = budget;
  j["signal_res"] = signal_res;
  j["seed"] = seed;
  j["d_in"] = m.d_in();
  j["d_out"] = m.d_out();
  for (const auto& [k, v] : m.knobs()) j["knobs"][k] = v;
  auto dump = [&](const char* group, const std::vector<NamedTensor>& ts) {
    for (const NamedTensor& p : ts) {
      const std::string file = std::string(group) + "_" + p.name + ".inrb";
      save_tensor(p.value, (fs::path(dir) / file).string());
      j[group].push_back({{"name", p.name}, {"file", file}, {"shape", p.value.shape}});
    }
  };
  dump("params", m.params);
  dump("frozen", m.frozen);
  std::ofstream os(fs::path(dir) / "manifest.json");
  if (!os) throw IoError("cannot write checkpoint manifest in " + dir);
  os << j.dump(2) << "\n";
}

std::unique_ptr<FieldModel> load_checkpoint(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream is(fs::path(dir) / "manifest.json");
  if (!is) throw IoError("missing checkpoint manifest in " + dir);
  nlohmann::json j = nlohmann::json::parse(is, nullptr, false);
  if (j.is_discarded()) throw IoError("malformed checkpoint manifest in " + dir);
  auto m = make_model(kind_from_name(j.at("kind").get<std::string>()),
                      j.at("budget").get<int64_t>(), j.at("d_in").get<int>(),
                      j.at("d_out").get<int>(), j.at("signal_res").get<int64_t>(),
                      j.at("seed").get<uint64_t>());
  auto restore = [&](const char* group, std::vector<NamedTensor>& ts) {
    if (!j.contains(group)) return;
    for (const auto& e : j.at(group)) {
      const std::string name = e.at("name").get<std::string>();
      const auto shape = e.at("shape").get<std::vector<int64_t>>();
      bool found = false;
      for (NamedTensor& p : ts)
        if (p.name == name) {
          p.value = load_tensor(
              (fs::path(dir) / e.at("file").get<std::string>()).string(), shape);
          found = true;
          break;
        }
      if (!found) throw IoError("checkpoint names a tensor the model lacks: " + name);
    }
  };
  restore("params", m->params);
  restore("frozen", m->frozen);
  return m;
}

}  // namespace inrb
