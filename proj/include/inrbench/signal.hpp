#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inrbench/tensor.hpp"

namespace inrb {

// A d-dimensional lattice of channel values in [0,1]. Values are stored
// row-major over the spatial axes with the channel as the fastest axis.
struct SampledSignal {
  int dim = 2;                       // 2 or 3
  std::vector<int64_t> resolution;   // per-axis extents, size == dim
  int channels = 1;                  // 1 or 3
  std::vector<double> values;
  std::optional<double> bandwidth_label;
  std::optional<int64_t> seed;

  int64_t spatial_count() const {
    int64_t n = 1;
    for (int64_t r : resolution) n *= r;
    return n;
  }
  int64_t value_count() const { return spatial_count() * channels; }

  double& at2(int64_t y, int64_t x, int c = 0) {
    return values[static_cast<size_t>((y * resolution[1] + x) * channels + c)];
  }
  double at2(int64_t y, int64_t x, int c = 0) const {
    return values[static_cast<size_t>((y * resolution[1] + x) * channels + c)];
  }
  double& at3(int64_t z, int64_t y, int64_t x, int c = 0) {
    return values[static_cast<size_t>(((z * resolution[1] + y) * resolution[2] + x) * channels + c)];
  }
  double at3(int64_t z, int64_t y, int64_t x, int c = 0) const {
    return values[static_cast<size_t>(((z * resolution[1] + y) * resolution[2] + x) * channels + c)];
  }

  Tensor as_tensor() const {
    std::vector<int64_t> shape = resolution;
    if (channels > 1) shape.push_back(channels);
    return Tensor(shape, values);
  }
};

// Native container: "INRB" | version u8=1 | dim u8 | channels u8 |
// per-axis u32 extents (LE) | raw f32 LE values, row-major.
void save_signal(const SampledSignal& s, const std::string& path);
SampledSignal load_signal(const std::string& path);

// PGM (P5) / PPM (P6) ingestion; 8-bit and 16-bit maxval supported,
// scaled to [0,1].
SampledSignal load_raster(const std::string& path);
void save_pgm(const SampledSignal& s, const std::string& path);
void save_ppm_rgb(const std::vector<uint8_t>& rgb, int64_t w, int64_t h,
                  const std::string& path);

}  // namespace inrb
