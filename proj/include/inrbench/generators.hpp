#pragma once

#include <cstdint>
#include <vector>

#include "inrbench/signal.hpp"

namespace inrb {

// One of the nine concentric annuli of a star target. Ring 1 is the
// outermost annulus, ring 9 the center disk; together they tile the disk.
struct RingMask {
  int ring_index = 0;              // 1..9
  std::vector<uint8_t> mask;       // row-major, same lattice as the signal
};

// Radial DFT cutoff (in frequency-index units) for bandwidth label b:
// cutoff = f_nyquist * 2^(k-9) with k = round(10*b), so cutoff(0.9) = Nyquist.
double bandlimit_cutoff(double b, int64_t resolution);

// Uniform noise low-passed with a hard radial mask at bandlimit_cutoff(b),
// then min-max normalized to [0,1].
SampledSignal gen_bandlimited(int dim, int64_t resolution, double b, uint64_t seed);

// Binary union of n(b) = round(2^(9b)) disks/balls of radius 0.35*n^(-1/dim)
// in unit coordinates, centers uniform per seed.
SampledSignal gen_spheres(int dim, int64_t resolution, double b, uint64_t seed);

// Binary Sierpinski triangle at iteration depth round(9b), clipped to [1,8].
SampledSignal gen_sierpinski(int64_t resolution, double b);

// Alternating 0/1 angular wedges inside the unit disk, plus the nine
// equal-width ring masks.
struct StarTarget {
  SampledSignal signal;
  std::vector<RingMask> rings;     // size 9
};
StarTarget gen_star_target(int64_t resolution, int wedges = 32);

// values + N(0, eps^2), clamped to [0,1].
SampledSignal add_gaussian_noise(const SampledSignal& s, double eps, uint64_t seed);

// 2D: block mean over factor x factor tiles (factor must divide each axis).
// 3D: factor halves the total voxel count; realized by trilinear resampling
// to round(R * factor^(-1/3)) per axis.
SampledSignal downsample(const SampledSignal& s, int factor);

// Modified Shepp-Logan head phantom on an N x N lattice, values in [0,1].
SampledSignal shepp_logan(int64_t resolution);

}  // namespace inrb
