#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "wavden/error.hpp"

namespace wavden {

// Single 2D plane of float samples, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<float> samples;

  Plane() = default;
  Plane(int w, int h, float fill = 0.0f) : width(w), height(h), samples(size_t(w) * h, fill) {
    if (w < 1 || h < 1) fail("io.dimension", "plane dimensions must be >= 1");
  }

  float& at(int row, int col) { return samples[size_t(row) * width + col]; }
  float at(int row, int col) const { return samples[size_t(row) * width + col]; }
  size_t size() const { return samples.size(); }
};

// width x height x bands raster, band-sequential, each band row-major.
// `lo`/`hi` declare the valid sample interval; reads never clip, clip_to_range does.
struct MultiBandRaster {
  int width = 0;
  int height = 0;
  int bands = 1;
  std::vector<float> samples;
  float lo = 0.0f;
  float hi = 65535.0f;

  MultiBandRaster() = default;
  MultiBandRaster(int w, int h, int b, float fill = 0.0f)
      : width(w), height(h), bands(b), samples(size_t(w) * h * b, fill) {
    if (w < 1 || h < 1) fail("io.dimension", "raster dimensions must be >= 1");
    if (b != 1 && b != 3 && b != 4) fail("io.dimension", "band count must be 1, 3 or 4");
  }

  size_t band_size() const { return size_t(width) * height; }

  float* band(int b) { return samples.data() + band_size() * b; }
  const float* band(int b) const { return samples.data() + band_size() * b; }

  Plane band_plane(int b) const {
    Plane p(width, height);
    std::copy(band(b), band(b) + band_size(), p.samples.begin());
    return p;
  }

  void set_band(int b, const Plane& p) {
    if (p.width != width || p.height != height) fail("io.dimension", "band plane size mismatch");
    std::copy(p.samples.begin(), p.samples.end(), band(b));
  }
};

inline MultiBandRaster clip_to_range(const MultiBandRaster& r) {
  MultiBandRaster out = r;
  for (float& s : out.samples) s = std::min(r.hi, std::max(r.lo, s));
  return out;
}

inline void clip_plane(Plane& p, float lo, float hi) {
  for (float& s : p.samples) s = std::min(hi, std::max(lo, s));
}

}  // namespace wavden
