#pragma once

#include "wavden/plane.hpp"

namespace wavden {

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 65535.0;
};

// 10*log10(L^2 / MSE), MSE accumulated in 64-bit. Identical planes report
// +infinity rather than an error.
double psnr(const Plane& a, const Plane& b, double peak);

// Mean of the local SSIM map (Gaussian 11x11 window, sigma 1.5), computed at
// every pixel with symmetric boundary extension so the full plane contributes.
double ssim(const Plane& a, const Plane& b, const SsimConfig& cfg = {});

}  // namespace wavden
