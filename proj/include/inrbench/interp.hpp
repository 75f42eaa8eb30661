#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace inrb {

// Piecewise cubic kernel (Catmull-Rom at a = -0.5).
inline double cubic_kernel(double t, double a = -0.5) {
  const double x = std::fabs(t);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x <= 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

inline int64_t clamp_index(int64_t i, int64_t n) {
  return std::max<int64_t>(0, std::min<int64_t>(i, n - 1));
}

// Maps a coordinate in [-1,1) to continuous lattice index space [ -0.5, n-0.5 ),
// with lattice points at cell centers.
inline double to_index_space(double x, int64_t n) {
  return (x + 1.0) * 0.5 * static_cast<double>(n) - 0.5;
}

// 1D bicubic taps: 4 clamped indices and kernel weights around u (index space).
struct CubicTaps {
  int64_t idx[4];
  double w[4];
};

inline CubicTaps cubic_taps(double u, int64_t n) {
  CubicTaps t;
  const double f = std::floor(u);
  const int64_t i0 = static_cast<int64_t>(f);
  const double s = u - f;
  for (int k = -1; k <= 2; ++k) {
    t.idx[k + 1] = clamp_index(i0 + k, n);
    t.w[k + 1] = cubic_kernel(s - static_cast<double>(k));
  }
  return t;
}

// 1D linear taps: 2 clamped indices with weights 1-|u-ui|.
struct LinearTaps {
  int64_t idx[2];
  double w[2];
};

inline LinearTaps linear_taps(double u, int64_t n) {
  LinearTaps t;
  const double f = std::floor(u);
  const int64_t i0 = static_cast<int64_t>(f);
  const double s = u - f;
  t.idx[0] = clamp_index(i0, n);
  t.idx[1] = clamp_index(i0 + 1, n);
  t.w[0] = 1.0 - s;
  t.w[1] = s;
  return t;
}

}  // namespace inrb
