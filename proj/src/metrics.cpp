#include "wavden/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace wavden {

double psnr(const Plane& a, const Plane& b, double peak) {
  if (a.width != b.width || a.height != b.height)
    fail("io.dimension", "psnr: plane size mismatch");
  if (!(peak > 0.0)) fail("config.invalid", "psnr: peak must be > 0");
  double mse = 0.0;
  for (size_t i = 0; i < a.samples.size(); i++) {
    const double d = double(a.samples[i]) - double(b.samples[i]);
    mse += d * d;
  }
  mse /= double(a.samples.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {

int mirror_index(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

// Separable Gaussian window filtering with symmetric extension.
std::vector<double> gauss_filter(const std::vector<double>& img, int w, int h,
                                 const std::vector<double>& kernel) {
  const int radius = int(kernel.size()) / 2;
  std::vector<double> tmp(img.size()), out(img.size());
  for (int r = 0; r < h; r++) {
    for (int c = 0; c < w; c++) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; k++)
        acc += kernel[size_t(k + radius)] * img[size_t(r) * w + mirror_index(c + k, w)];
      tmp[size_t(r) * w + c] = acc;
    }
  }
  for (int c = 0; c < w; c++) {
    for (int r = 0; r < h; r++) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; k++)
        acc += kernel[size_t(k + radius)] * tmp[size_t(mirror_index(r + k, h)) * w + c];
      out[size_t(r) * w + c] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(const Plane& a, const Plane& b, const SsimConfig& cfg) {
  if (a.width != b.width || a.height != b.height)
    fail("io.dimension", "ssim: plane size mismatch");
  if (a.width < cfg.window || a.height < cfg.window)
    fail("io.dimension", "ssim: plane smaller than the " + std::to_string(cfg.window) + "x" +
                             std::to_string(cfg.window) + " window");

  std::vector<double> kernel(size_t(cfg.window), 0.0);
  const int radius = cfg.window / 2;
  double ksum = 0.0;
  for (int k = -radius; k <= radius; k++) {
    const double v = std::exp(-0.5 * (k * k) / (cfg.sigma * cfg.sigma));
    kernel[size_t(k + radius)] = v;
    ksum += v;
  }
  for (double& v : kernel) v /= ksum;

  const int w = a.width, h = a.height;
  const size_t n = a.samples.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (size_t i = 0; i < n; i++) {
    x[i] = a.samples[i];
    y[i] = b.samples[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = gauss_filter(x, w, h, kernel);
  const auto my = gauss_filter(y, w, h, kernel);
  const auto mxx = gauss_filter(xx, w, h, kernel);
  const auto myy = gauss_filter(yy, w, h, kernel);
  const auto mxy = gauss_filter(xy, w, h, kernel);

  const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
  const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);
  double total = 0.0;
  for (size_t i = 0; i < n; i++) {
    const double vx = mxx[i] - mx[i] * mx[i];
    const double vy = myy[i] - my[i] * my[i];
    const double cov = mxy[i] - mx[i] * my[i];
    const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
    const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
    total += num / den;
  }
  return total / double(n);
}

}  // namespace wavden
