#include "inrbench/gsplat.hpp"

#include <algorithm>
#include <cmath>

#include "inrbench/errors.hpp"

namespace inrb {

namespace {

constexpr double kQCut = 50.0;    // truncation radius in Mahalanobis units
constexpr double kAlphaCap = 0.995;

struct Splat {
  double mx, my;      // mean
  double ea, eb, c;   // precision Cholesky entries
  double rho;         // sigmoid(opacity)
  double r;           // truncation radius in coordinate units
};

// Conservative coordinate-space radius containing {q <= kQCut}:
// q >= smin(M)^2 |d|^2, so |d| <= sqrt(kQCut) / smin(M).
double trunc_radius(double ea, double eb, double c) {
  // singular values of M from eigenvalues of M^T M
  const double g11 = ea * ea + c * c, g12 = c * eb, g22 = eb * eb;
  const double tr = g11 + g22;
  const double det = std::max(0.0, tr * tr / 4.0 - (g11 * g22 - g12 * g12));
  const double lmin = std::max(1e-300, tr / 2.0 - std::sqrt(det));
  return std::sqrt(kQCut / lmin);
}

std::vector<Splat> prepare(const Tensor& means, const Tensor& chol,
                           const Tensor& opacity) {
  const int64_t n = means.rows();
  std::vector<Splat> sp(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    Splat& s = sp[static_cast<size_t>(i)];
    s.mx = means.at2(i, 0);
    s.my = means.at2(i, 1);
    s.ea = std::exp(chol.at2(i, 0));
    s.eb = std::exp(chol.at2(i, 1));
    s.c = chol.at2(i, 2);
    s.rho = 1.0 / (1.0 + std::exp(-opacity.at(i)));
    s.r = trunc_radius(s.ea, s.eb, s.c);
  }
  return sp;
}

}  // namespace

ad::Var gsplat_render(ad::Tape& t, ad::Var means, ad::Var chol, ad::Var opacity,
                      ad::Var color, const Tensor& coords) {
  const Tensor& mv = t.value(means);
  const Tensor& cv = t.value(chol);
  const Tensor& ov = t.value(opacity);
  const Tensor& colv = t.value(color);
  const int64_t n = mv.rows();
  const int64_t b = coords.rows();
  const int64_t ch = colv.cols();
  if (cv.rows() != n || ov.rows() != n || colv.rows() != n)
    throw BuildError("gsplat_render: inconsistent Gaussian counts");

  std::vector<Splat> sp = prepare(mv, cv, ov);
  Tensor out({b, ch});
  for (int64_t p = 0; p < b; ++p) {
    const double px = coords.at2(p, 0), py = coords.at2(p, 1);
    double trans = 1.0;
    for (int64_t i = 0; i < n && trans > 1e-8; ++i) {
      const Splat& s = sp[static_cast<size_t>(i)];
      const double dx = px - s.mx, dy = py - s.my;
      if (std::fabs(dx) > s.r || std::fabs(dy) > s.r) continue;
      const double y1 = s.ea * dx, y2 = s.c * dx + s.eb * dy;
      const double q = y1 * y1 + y2 * y2;
      if (q > kQCut) continue;
      const double alpha = std::min(kAlphaCap, s.rho * std::exp(-q / 2.0));
      for (int64_t k = 0; k < ch; ++k)
        out.at2(p, k) += trans * alpha * colv.at2(i, k);
      trans *= 1.0 - alpha;
    }
  }

  // The backward walk revisits each point front-to-back, reconstructing the
  // per-Gaussian transmittance and using suffix sums of the composited color.
  Tensor coords_copy = coords;
  auto back = [means, chol, opacity, color, coords_copy, sp = std::move(sp), n, b,
               ch](ad::Tape& tp, ad::Var out_var) {
    const Tensor& go = tp.grad(out_var);
    const Tensor& mv2 = tp.value(means);
    const Tensor& colv2 = tp.value(color);
    const Tensor& outv = tp.value(out_var);
    Tensor& gm = tp.grad_accum(means);
    Tensor& gc = tp.grad_accum(chol);
    Tensor& gop = tp.grad_accum(opacity);
    Tensor& gcol = tp.grad_accum(color);
    std::vector<double> prefix(static_cast<size_t>(ch));
    for (int64_t p = 0; p < b; ++p) {
      const double px = coords_copy.at2(p, 0), py = coords_copy.at2(p, 1);
      std::fill(prefix.begin(), prefix.end(), 0.0);
      double trans = 1.0;
      for (int64_t i = 0; i < n && trans > 1e-8; ++i) {
        const Splat& s = sp[static_cast<size_t>(i)];
        const double dx = px - mv2.at2(i, 0), dy = py - mv2.at2(i, 1);
        if (std::fabs(dx) > s.r || std::fabs(dy) > s.r) continue;
        const double y1 = s.ea * dx, y2 = s.c * dx + s.eb * dy;
        const double q = y1 * y1 + y2 * y2;
        if (q > kQCut) continue;
        const double raw = s.rho * std::exp(-q / 2.0);
        const bool capped = raw >= kAlphaCap;
        const double alpha = capped ? kAlphaCap : raw;
        // d out_k / d alpha_i = color_ik * T_i - S_{i+1,k} / (1 - alpha_i)
        double dalpha = 0.0;
        for (int64_t k = 0; k < ch; ++k) {
          const double g = go.at2(p, k);
          const double contrib = trans * alpha * colv2.at2(i, k);
          gcol.at2(i, k) += g * trans * alpha;
          const double suffix = outv.at2(p, k) - (prefix[static_cast<size_t>(k)] + contrib);
          dalpha += g * (colv2.at2(i, k) * trans - suffix / (1.0 - alpha));
          prefix[static_cast<size_t>(k)] += contrib;
        }
        if (!capped) {
          gop.at(i) += dalpha * alpha * (1.0 - s.rho);
          const double dq = dalpha * (-alpha / 2.0);
          const double ddx = dq * 2.0 * (y1 * s.ea + y2 * s.c);
          const double ddy = dq * 2.0 * y2 * s.eb;
          gm.at2(i, 0) -= ddx;
          gm.at2(i, 1) -= ddy;
          gc.at2(i, 0) += dq * 2.0 * y1 * y1;
          gc.at2(i, 1) += dq * 2.0 * y2 * s.eb * dy;
          gc.at2(i, 2) += dq * 2.0 * y2 * dx;
        }
        trans *= 1.0 - alpha;
      }
    }
  };
  return t.custom(std::move(out), {means, chol, opacity, color}, std::move(back));
}

Tensor gsplat_render_oracle(const Tensor& means, const Tensor& chol,
                            const Tensor& opacity, const Tensor& color,
                            const Tensor& coords) {
  const int64_t n = means.rows(), b = coords.rows(), ch = color.cols();
  Tensor out({b, ch});
  for (int64_t p = 0; p < b; ++p) {
    const double px = coords.at2(p, 0), py = coords.at2(p, 1);
    double trans = 1.0;
    for (int64_t i = 0; i < n; ++i) {
      const double ea = std::exp(chol.at2(i, 0)), eb = std::exp(chol.at2(i, 1));
      const double c = chol.at2(i, 2);
      const double dx = px - means.at2(i, 0), dy = py - means.at2(i, 1);
      const double y1 = ea * dx, y2 = c * dx + eb * dy;
      const double rho = 1.0 / (1.0 + std::exp(-opacity.at(i)));
      const double alpha = std::min(kAlphaCap, rho * std::exp(-(y1 * y1 + y2 * y2) / 2.0));
      for (int64_t k = 0; k < ch; ++k)
        out.at2(p, k) += trans * alpha * color.at2(i, k);
      trans *= 1.0 - alpha;
    }
  }
  return out;
}

}  // namespace inrb
