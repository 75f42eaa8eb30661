#pragma once

#include <memory>
#include <vector>

#include "inrbench/signal.hpp"
#include "inrbench/tensor.hpp"

namespace inrb {

// Parallel-beam sampling pattern shared by the signal-path forward, its
// adjoint, and the differentiable model-path forward. Rays are ordered
// angle-major; each ray owns the in-domain samples along its line, taken at
// one-pixel steps. Detector offsets sit at pixel-center x coordinates.
struct RadonSamples {
  int n_angles = 0;
  int64_t n_det = 0;
  Tensor coords;  // [M, 2] all in-domain sample points, ray by ray
  std::shared_ptr<std::vector<int64_t>> ray_offsets;  // size n_angles*n_det + 1
};

RadonSamples radon_samples(int64_t img_res, int n_angles, int64_t n_det = 0);

// Line-integral sinogram [n_angles, n_det]: per ray, the plain sum of
// bilinear image samples (no step-length scaling).
Tensor radon_forward(const SampledSignal& img, int n_angles, int64_t n_det = 0);

// Exact transpose of radon_forward as a linear map on the image lattice.
Tensor radon_adjoint(const Tensor& sino, int64_t img_res, int n_angles,
                     int64_t n_det = 0);

}  // namespace inrb
