#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wavden/plane.hpp"

namespace wavden {

// Column-aligned stripe noise: n(i,j) = m(i) * c(j). c is per-column white
// Gaussian noise of std `sigma` smoothed with a moving average of width
// `corr_len`; m is a smooth vertical modulation profile 1 + drift*s(i) with
// s in [-1, 1]. drift = 0 makes every column exactly constant.
struct StripeNoiseParams {
  double sigma = 1310.0;  // ~2% of [0, 65535]
  int corr_len = 3;
  double drift = 0.0;
  uint64_t seed = 0;
};

// Horizontal wave noise: n(i,j) = amplitude * sum_k sin(2*pi*i/period_k + phi_k(j))
// where each phi_k is a random walk over columns with step std `phase_jitter`.
struct WaveNoiseParams {
  double amplitude = 700.0;
  std::vector<double> periods = {6.0, 11.0, 23.0};
  double phase_jitter = 0.03;
  uint64_t seed = 0;
};

Plane gen_stripe_noise(int width, int height, const StripeNoiseParams& p);
Plane gen_wave_noise(int width, int height, const WaveNoiseParams& p);

// Adds `noise` to one band of `clean` and clips to the declared range;
// returns (noisy, untouched ground truth).
std::pair<MultiBandRaster, MultiBandRaster> make_synthetic_pair(const MultiBandRaster& clean,
                                                                const Plane& noise, int band);

// Smooth synthetic scene content for desk-scale experiments: a few octaves of
// value noise plus a gradient, affinely mapped into [range_lo, range_hi].
// Default contrast is ocean/field-like, low enough that structured noise at a
// few percent of full range dominates the directional subbands it lives in.
Plane gen_texture(int width, int height, uint64_t seed, double range_lo = 24000.0,
                  double range_hi = 37000.0);

}  // namespace wavden
