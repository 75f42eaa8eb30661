#pragma once

#include <vector>

#include "inrbench/generators.hpp"
#include "inrbench/signal.hpp"

namespace inrb {

// 10*log10(peak^2 / mse); identical inputs give +infinity (serialized "inf").
double psnr(const SampledSignal& pred, const SampledSignal& gt, double peak = 1.0);

// Mean SSIM over an 11x11 Gaussian window (sigma 1.5, K1 0.01, K2 0.03,
// dynamic range 1), computed on windows fully inside the image and averaged
// per channel. 2D only.
double ssim(const SampledSignal& pred, const SampledSignal& gt);

// IoU of thresholded occupancy; empty union counts as 1.0.
double iou(const SampledSignal& pred, const SampledSignal& gt, double threshold = 0.5);

// PSNR restricted to each ring's pixels; empty rings yield -1 sentinels.
std::vector<double> ring_psnr(const SampledSignal& pred, const SampledSignal& gt,
                              const std::vector<RingMask>& masks);

}  // namespace inrb
