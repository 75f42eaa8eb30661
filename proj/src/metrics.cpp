#include "inrbench/metrics.hpp"

#include <cmath>
#include <limits>

#include "inrbench/errors.hpp"

namespace inrb {

namespace {

void check_shapes(const SampledSignal& a, const SampledSignal& b) {
  if (a.dim != b.dim || a.resolution != b.resolution || a.channels != b.channels)
    throw BuildError("metric inputs have mismatched shapes");
}

double mse_to_psnr(double mse, double peak) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace

double psnr(const SampledSignal& pred, const SampledSignal& gt, double peak) {
  check_shapes(pred, gt);
  double s = 0.0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    const double d = pred.values[i] - gt.values[i];
    s += d * d;
  }
  return mse_to_psnr(s / static_cast<double>(pred.values.size()), peak);
}

double ssim(const SampledSignal& pred, const SampledSignal& gt) {
  check_shapes(pred, gt);
  if (pred.dim != 2) throw BuildError("ssim is 2D only");
  const int64_t h = pred.resolution[0], w = pred.resolution[1];
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  if (h < kWin || w < kWin) throw BuildError("image smaller than the SSIM window");

  double kernel[kWin];
  double ksum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - (kWin - 1) / 2.0;
    kernel[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    ksum += kernel[i];
  }
  for (double& k : kernel) k /= ksum;

  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  for (int c = 0; c < pred.channels; ++c) {
    double acc = 0.0;
    int64_t count = 0;
    for (int64_t y = 0; y + kWin <= h; ++y)
      for (int64_t x = 0; x + kWin <= w; ++x) {
        double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
        for (int i = 0; i < kWin; ++i)
          for (int j = 0; j < kWin; ++j) {
            const double wgt = kernel[i] * kernel[j];
            const double a = pred.at2(y + i, x + j, c);
            const double b = gt.at2(y + i, x + j, c);
            mx += wgt * a;
            my += wgt * b;
            xx += wgt * a * a;
            yy += wgt * b * b;
            xy += wgt * a * b;
          }
        const double vx = xx - mx * mx, vy = yy - my * my, cov = xy - mx * my;
        acc += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
    total += acc / static_cast<double>(count);
  }
  return total / pred.channels;
}

double iou(const SampledSignal& pred, const SampledSignal& gt, double threshold) {
  check_shapes(pred, gt);
  int64_t inter = 0, uni = 0;
  for (size_t i = 0; i < pred.values.size(); ++i) {
    const bool a = pred.values[i] >= threshold;
    const bool b = gt.values[i] >= threshold;
    inter += a && b;
    uni += a || b;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> ring_psnr(const SampledSignal& pred, const SampledSignal& gt,
                              const std::vector<RingMask>& masks) {
  check_shapes(pred, gt);
  std::vector<double> out;
  out.reserve(masks.size());
  for (const RingMask& m : masks) {
    if (static_cast<int64_t>(m.mask.size()) != pred.spatial_count())
      throw BuildError("ring mask does not match the image lattice");
    double s = 0.0;
    int64_t n = 0;
    for (size_t i = 0; i < m.mask.size(); ++i) {
      if (!m.mask[i]) continue;
      for (int c = 0; c < pred.channels; ++c) {
        const size_t k = i * static_cast<size_t>(pred.channels) + c;
        const double d = pred.values[k] - gt.values[k];
        s += d * d;
        ++n;
      }
    }
    out.push_back(n == 0 ? -1.0 : mse_to_psnr(s / static_cast<double>(n), 1.0));
  }
  return out;
}

}  // namespace inrb
