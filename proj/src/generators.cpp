#include "inrbench/generators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "inrbench/errors.hpp"
#include "inrbench/interp.hpp"
#include "inrbench/rng.hpp"

namespace inrb {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW planning is not reentrant; execution is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// Signed frequency index of DFT bin i on an n-point axis.
double freq_index(int64_t i, int64_t n) {
  return (i <= n / 2) ? static_cast<double>(i) : static_cast<double>(i - n);
}

void normalize_minmax(SampledSignal& s) {
  double lo = s.values[0], hi = s.values[0];
  for (double v : s.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) throw DegenerateSignal("constant signal after generation");
  const double inv = 1.0 / (hi - lo);
  for (double& v : s.values) v = (v - lo) * inv;
}

}  // namespace

double bandlimit_cutoff(double b, int64_t resolution) {
  const int k = static_cast<int>(std::lround(10.0 * b));
  if (k < 1 || k > 9) throw BuildError("bandwidth label must be in {0.1,...,0.9}");
  const double f_nyq = static_cast<double>(resolution) / 2.0;
  return f_nyq * std::pow(2.0, k - 9);
}

SampledSignal gen_bandlimited(int dim, int64_t resolution, double b, uint64_t seed) {
  if (dim != 2 && dim != 3) throw BuildError("dim must be 2 or 3");
  if (resolution < 8) throw BuildError("resolution must be at least 8 per axis");
  const double cutoff = bandlimit_cutoff(b, resolution);
  const int64_t n = resolution;
  const int64_t total = dim == 2 ? n * n : n * n * n;

  Rng rng(seed);
  std::vector<fftw_complex> buf(static_cast<size_t>(total));
  for (int64_t i = 0; i < total; ++i) {
    buf[static_cast<size_t>(i)][0] = rng.uniform();
    buf[static_cast<size_t>(i)][1] = 0.0;
  }

  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lk(fftw_plan_mutex());
    if (dim == 2) {
      fwd = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf.data(),
                             buf.data(), FFTW_FORWARD, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf.data(),
                             buf.data(), FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      fwd = fftw_plan_dft_3d(static_cast<int>(n), static_cast<int>(n), static_cast<int>(n),
                             buf.data(), buf.data(), FFTW_FORWARD, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_3d(static_cast<int>(n), static_cast<int>(n), static_cast<int>(n),
                             buf.data(), buf.data(), FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }
  fftw_execute(fwd);

  const double c2 = cutoff * cutoff;
  int64_t idx = 0;
  if (dim == 2) {
    for (int64_t i = 0; i < n; ++i) {
      const double fi = freq_index(i, n);
      for (int64_t j = 0; j < n; ++j, ++idx) {
        const double fj = freq_index(j, n);
        if (fi * fi + fj * fj > c2) {
          buf[static_cast<size_t>(idx)][0] = 0.0;
          buf[static_cast<size_t>(idx)][1] = 0.0;
        }
      }
    }
  } else {
    for (int64_t i = 0; i < n; ++i) {
      const double fi = freq_index(i, n);
      for (int64_t j = 0; j < n; ++j) {
        const double fj = freq_index(j, n);
        for (int64_t k = 0; k < n; ++k, ++idx) {
          const double fk = freq_index(k, n);
          if (fi * fi + fj * fj + fk * fk > c2) {
            buf[static_cast<size_t>(idx)][0] = 0.0;
            buf[static_cast<size_t>(idx)][1] = 0.0;
          }
        }
      }
    }
  }

  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lk(fftw_plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }

  SampledSignal s;
  s.dim = dim;
  s.resolution.assign(static_cast<size_t>(dim), n);
  s.channels = 1;
  s.bandwidth_label = b;
  s.seed = static_cast<int64_t>(seed);
  s.values.resize(static_cast<size_t>(total));
  const double scale = 1.0 / static_cast<double>(total);
  for (int64_t i = 0; i < total; ++i)
    s.values[static_cast<size_t>(i)] = buf[static_cast<size_t>(i)][0] * scale;
  normalize_minmax(s);
  return s;
}

SampledSignal gen_spheres(int dim, int64_t resolution, double b, uint64_t seed) {
  if (dim != 2 && dim != 3) throw BuildError("dim must be 2 or 3");
  if (resolution < 8) throw BuildError("resolution must be at least 8 per axis");
  const int64_t count = std::llround(std::pow(2.0, 9.0 * b));
  const double radius = 0.35 * std::pow(static_cast<double>(count), -1.0 / dim);
  Rng rng(seed);
  std::vector<double> centers(static_cast<size_t>(count * dim));
  for (double& c : centers) c = rng.uniform();

  SampledSignal s;
  s.dim = dim;
  s.resolution.assign(static_cast<size_t>(dim), resolution);
  s.channels = 1;
  s.bandwidth_label = b;
  s.seed = static_cast<int64_t>(seed);
  s.values.assign(static_cast<size_t>(s.spatial_count()), 0.0);

  const double r2 = radius * radius;
  const int64_t n = resolution;
  auto coord = [n](int64_t i) { return (static_cast<double>(i) + 0.5) / static_cast<double>(n); };
  if (dim == 2) {
    for (int64_t y = 0; y < n; ++y)
      for (int64_t x = 0; x < n; ++x) {
        const double py = coord(y), px = coord(x);
        for (int64_t c = 0; c < count; ++c) {
          const double dy = py - centers[static_cast<size_t>(2 * c)];
          const double dx = px - centers[static_cast<size_t>(2 * c + 1)];
          if (dy * dy + dx * dx <= r2) {
            s.at2(y, x) = 1.0;
            break;
          }
        }
      }
  } else {
    for (int64_t z = 0; z < n; ++z)
      for (int64_t y = 0; y < n; ++y)
        for (int64_t x = 0; x < n; ++x) {
          const double pz = coord(z), py = coord(y), px = coord(x);
          for (int64_t c = 0; c < count; ++c) {
            const double dz = pz - centers[static_cast<size_t>(3 * c)];
            const double dy = py - centers[static_cast<size_t>(3 * c + 1)];
            const double dx = px - centers[static_cast<size_t>(3 * c + 2)];
            if (dz * dz + dy * dy + dx * dx <= r2) {
              s.at3(z, y, x) = 1.0;
              break;
            }
          }
        }
  }
  bool any0 = false, any1 = false;
  for (double v : s.values) (v > 0.5 ? any1 : any0) = true;
  if (!any0 || !any1) throw DegenerateSignal("spheres signal is constant");
  return s;
}

namespace {

// Point-in-fractal test on the right triangle {x,y >= 0, x+y <= 1}: at each
// level the point either enters a corner sub-triangle or falls into the
// removed central one. Retained area after k levels is exactly (3/4)^k.
bool sierpinski_filled(double x, double y, int depth) {
  if (x < 0.0 || y < 0.0 || x + y > 1.0) return false;
  for (int i = 0; i < depth; ++i) {
    x *= 2.0;
    y *= 2.0;
    if (x >= 1.0) {
      x -= 1.0;
    } else if (y >= 1.0) {
      y -= 1.0;
    } else if (x + y >= 1.0) {
      return false;
    }
  }
  return true;
}

}  // namespace

SampledSignal gen_sierpinski(int64_t resolution, double b) {
  if (resolution < 8) throw BuildError("resolution must be at least 8 per axis");
  int depth = static_cast<int>(std::lround(9.0 * b));
  depth = std::max(1, std::min(8, depth));
  SampledSignal s;
  s.dim = 2;
  s.resolution = {resolution, resolution};
  s.channels = 1;
  s.bandwidth_label = b;
  s.values.assign(static_cast<size_t>(resolution * resolution), 0.0);
  const double inv = 1.0 / static_cast<double>(resolution);
  for (int64_t y = 0; y < resolution; ++y)
    for (int64_t x = 0; x < resolution; ++x) {
      const double px = (static_cast<double>(x) + 0.5) * inv;
      const double py = (static_cast<double>(y) + 0.5) * inv;
      if (sierpinski_filled(px, py, depth)) s.at2(y, x) = 1.0;
    }
  return s;
}

StarTarget gen_star_target(int64_t resolution, int wedges) {
  if (resolution < 8) throw BuildError("resolution must be at least 8 per axis");
  if (wedges <= 0 || wedges % 2 != 0) throw BuildError("wedge count must be even and positive");
  StarTarget out;
  SampledSignal& s = out.signal;
  s.dim = 2;
  s.resolution = {resolution, resolution};
  s.channels = 1;
  s.values.assign(static_cast<size_t>(resolution * resolution), 0.0);
  out.rings.resize(9);
  for (int r = 0; r < 9; ++r) {
    out.rings[static_cast<size_t>(r)].ring_index = r + 1;
    out.rings[static_cast<size_t>(r)].mask.assign(s.values.size(), 0);
  }
  const double wedge_angle = 2.0 * kPi / wedges;
  for (int64_t y = 0; y < resolution; ++y)
    for (int64_t x = 0; x < resolution; ++x) {
      const double px = -1.0 + 2.0 * (static_cast<double>(x) + 0.5) / resolution;
      const double py = -1.0 + 2.0 * (static_cast<double>(y) + 0.5) / resolution;
      const double r = std::sqrt(px * px + py * py);
      if (r > 1.0) continue;
      const double theta = std::atan2(py, px) + kPi;
      const int w = std::min(wedges - 1, static_cast<int>(theta / wedge_angle));
      if (w % 2 == 0) s.at2(y, x) = 1.0;
      // ring 1 covers (8/9, 1], ring 9 covers [0, 1/9]
      int ring = 9 - static_cast<int>(std::ceil(r * 9.0 - 1e-12));
      ring = std::max(0, std::min(8, ring));
      out.rings[static_cast<size_t>(ring)].mask[static_cast<size_t>(y * resolution + x)] = 1;
    }
  return out;
}

SampledSignal add_gaussian_noise(const SampledSignal& in, double eps, uint64_t seed) {
  if (eps < 0.0) throw BuildError("noise level must be nonnegative");
  SampledSignal s = in;
  if (eps == 0.0) return s;
  Rng rng(seed);
  for (double& v : s.values) {
    v += eps * rng.normal();
    v = std::max(0.0, std::min(1.0, v));
  }
  return s;
}

SampledSignal downsample(const SampledSignal& in, int factor) {
  if (factor < 1) throw BuildError("downsample factor must be positive");
  SampledSignal out;
  out.dim = in.dim;
  out.channels = in.channels;
  out.bandwidth_label = in.bandwidth_label;
  out.seed = in.seed;
  if (in.dim == 2) {
    const int64_t h = in.resolution[0], w = in.resolution[1];
    if (h % factor != 0 || w % factor != 0)
      throw BuildError("downsample factor must divide the 2D resolution");
    const int64_t oh = h / factor, ow = w / factor;
    out.resolution = {oh, ow};
    out.values.assign(static_cast<size_t>(oh * ow * in.channels), 0.0);
    const double inv = 1.0 / static_cast<double>(factor * factor);
    for (int64_t y = 0; y < oh; ++y)
      for (int64_t x = 0; x < ow; ++x)
        for (int c = 0; c < in.channels; ++c) {
          double acc = 0.0;
          for (int dy = 0; dy < factor; ++dy)
            for (int dx = 0; dx < factor; ++dx)
              acc += in.at2(y * factor + dy, x * factor + dx, c);
          out.at2(y, x, c) = acc * inv;
        }
    return out;
  }
  // 3D: shrink total voxels by `factor` via trilinear resampling.
  const int64_t n = in.resolution[0];
  const int64_t m = std::max<int64_t>(
      2, std::llround(static_cast<double>(n) * std::pow(static_cast<double>(factor), -1.0 / 3.0)));
  out.resolution = {m, m, m};
  out.values.assign(static_cast<size_t>(m * m * m * in.channels), 0.0);
  for (int64_t z = 0; z < m; ++z)
    for (int64_t y = 0; y < m; ++y)
      for (int64_t x = 0; x < m; ++x) {
        const double cz = -1.0 + 2.0 * (static_cast<double>(z) + 0.5) / m;
        const double cy = -1.0 + 2.0 * (static_cast<double>(y) + 0.5) / m;
        const double cx = -1.0 + 2.0 * (static_cast<double>(x) + 0.5) / m;
        const LinearTaps tz = linear_taps(to_index_space(cz, n), n);
        const LinearTaps ty = linear_taps(to_index_space(cy, n), n);
        const LinearTaps tx = linear_taps(to_index_space(cx, n), n);
        for (int c = 0; c < in.channels; ++c) {
          double acc = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              for (int d = 0; d < 2; ++d)
                acc += tz.w[a] * ty.w[b] * tx.w[d] *
                       in.at3(tz.idx[a], ty.idx[b], tx.idx[d], c);
          out.at3(z, y, x, c) = acc;
        }
      }
  return out;
}

SampledSignal shepp_logan(int64_t resolution) {
  if (resolution < 8) throw BuildError("resolution must be at least 8 per axis");
  // Modified Shepp-Logan ellipses: {intensity, a, b, x0, y0, phi_deg}
  static const double E[10][6] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
      {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
      {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
      {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
      {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
      {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
      {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0}};
  SampledSignal s;
  s.dim = 2;
  s.resolution = {resolution, resolution};
  s.channels = 1;
  s.values.assign(static_cast<size_t>(resolution * resolution), 0.0);
  for (int64_t y = 0; y < resolution; ++y)
    for (int64_t x = 0; x < resolution; ++x) {
      const double px = -1.0 + 2.0 * (static_cast<double>(x) + 0.5) / resolution;
      const double py = 1.0 - 2.0 * (static_cast<double>(y) + 0.5) / resolution;
      double v = 0.0;
      for (const auto& e : E) {
        const double phi = e[5] * kPi / 180.0;
        const double c = std::cos(phi), sn = std::sin(phi);
        const double dx = px - e[3], dy = py - e[4];
        const double u = (dx * c + dy * sn) / e[1];
        const double w = (-dx * sn + dy * c) / e[2];
        if (u * u + w * w <= 1.0) v += e[0];
      }
      s.at2(y, x) = std::max(0.0, std::min(1.0, v));
    }
  return s;
}

}  // namespace inrb
