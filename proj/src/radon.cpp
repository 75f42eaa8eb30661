#include "inrbench/radon.hpp"

#include <cmath>

#include "inrbench/errors.hpp"
#include "inrbench/interp.hpp"

namespace inrb {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Ray {
  double dx, dy;  // detector axis (offset direction)
  double rx, ry;  // ray direction
  double t;       // detector offset
};

}  // namespace

RadonSamples radon_samples(int64_t img_res, int n_angles, int64_t n_det) {
  if (img_res < 2 || n_angles < 1) throw BuildError("bad radon geometry");
  if (n_det <= 0) n_det = img_res;
  const int64_t S = static_cast<int64_t>(
      std::ceil(std::sqrt(2.0) * static_cast<double>(img_res)));
  const double step = 2.0 / static_cast<double>(img_res);

  RadonSamples out;
  out.n_angles = n_angles;
  out.n_det = n_det;
  out.ray_offsets = std::make_shared<std::vector<int64_t>>();
  out.ray_offsets->reserve(static_cast<size_t>(n_angles * n_det + 1));
  out.ray_offsets->push_back(0);
  std::vector<double> pts;
  for (int a = 0; a < n_angles; ++a) {
    const double theta = kPi * static_cast<double>(a) / n_angles;
    const double dx = std::cos(theta), dy = std::sin(theta);
    const double rx = -dy, ry = dx;
    for (int64_t j = 0; j < n_det; ++j) {
      const double t = -1.0 + 2.0 * (static_cast<double>(j) + 0.5) / n_det;
      for (int64_t k = 0; k < S; ++k) {
        const double s = (static_cast<double>(k) - (S - 1) / 2.0) * step;
        const double px = t * dx + s * rx;
        const double py = t * dy + s * ry;
        if (px < -1.0 || px > 1.0 || py < -1.0 || py > 1.0) continue;
        pts.push_back(py);
        pts.push_back(px);
      }
      out.ray_offsets->push_back(static_cast<int64_t>(pts.size() / 2));
    }
  }
  const int64_t n_pts = static_cast<int64_t>(pts.size() / 2);
  out.coords = Tensor({n_pts, 2}, std::move(pts));
  return out;
}

Tensor radon_forward(const SampledSignal& img, int n_angles, int64_t n_det) {
  if (img.dim != 2 || img.channels != 1)
    throw BuildError("radon_forward expects a 2D single-channel image");
  const int64_t n = img.resolution[0];
  if (img.resolution[1] != n) throw BuildError("radon_forward expects a square image");
  RadonSamples rs = radon_samples(n, n_angles, n_det);
  const int64_t rays = static_cast<int64_t>(rs.ray_offsets->size()) - 1;
  Tensor sino({rs.n_angles, rs.n_det});
  for (int64_t r = 0; r < rays; ++r) {
    double acc = 0.0;
    for (int64_t k = (*rs.ray_offsets)[static_cast<size_t>(r)];
         k < (*rs.ray_offsets)[static_cast<size_t>(r + 1)]; ++k) {
      const LinearTaps ty = linear_taps(to_index_space(rs.coords.at2(k, 0), n), n);
      const LinearTaps tx = linear_taps(to_index_space(rs.coords.at2(k, 1), n), n);
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
          acc += ty.w[a] * tx.w[c] * img.at2(ty.idx[a], tx.idx[c]);
    }
    sino.at(r) = acc;
  }
  return sino;
}

Tensor radon_adjoint(const Tensor& sino, int64_t img_res, int n_angles,
                     int64_t n_det) {
  RadonSamples rs = radon_samples(img_res, n_angles, n_det);
  if (sino.numel() != static_cast<int64_t>(rs.n_angles) * rs.n_det)
    throw BuildError("sinogram shape does not match the radon geometry");
  const int64_t rays = static_cast<int64_t>(rs.ray_offsets->size()) - 1;
  Tensor img({img_res, img_res});
  for (int64_t r = 0; r < rays; ++r) {
    const double v = sino.at(r);
    for (int64_t k = (*rs.ray_offsets)[static_cast<size_t>(r)];
         k < (*rs.ray_offsets)[static_cast<size_t>(r + 1)]; ++k) {
      const LinearTaps ty = linear_taps(to_index_space(rs.coords.at2(k, 0), img_res), img_res);
      const LinearTaps tx = linear_taps(to_index_space(rs.coords.at2(k, 1), img_res), img_res);
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
          img.at(ty.idx[a] * img_res + tx.idx[c]) += v * ty.w[a] * tx.w[c];
    }
  }
  return img;
}

}  // namespace inrb
