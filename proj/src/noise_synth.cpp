#include "wavden/noise_synth.hpp"

#include <cmath>

#include "wavden/rng.hpp"

namespace wavden {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

Plane gen_stripe_noise(int width, int height, const StripeNoiseParams& p) {
  if (width < 1 || height < 1) fail("io.dimension", "stripe noise: dims must be >= 1");
  if (p.sigma < 0.0 || p.corr_len < 1 || p.drift < 0.0 || p.drift > 1.0)
    fail("config.invalid", "stripe noise: bad parameters");

  Rng rng(p.seed);
  Rng col_rng = rng.split(1);
  Rng drift_rng = rng.split(2);

  std::vector<double> raw(size_t(width), 0.0);
  for (double& v : raw) v = col_rng.normal(0.0, p.sigma);

  // Moving average over a clamped window, renormalized at the edges.
  std::vector<double> col(size_t(width), 0.0);
  const int lo_off = p.corr_len / 2, hi_off = (p.corr_len - 1) / 2;
  for (int j = 0; j < width; j++) {
    const int from = std::max(0, j - lo_off), to = std::min(width - 1, j + hi_off);
    double acc = 0.0;
    for (int k = from; k <= to; k++) acc += raw[size_t(k)];
    col[size_t(j)] = acc / double(to - from + 1);
  }

  // Smooth vertical modulation: three random harmonics scaled into [-1, 1].
  std::vector<double> profile(size_t(height), 0.0);
  if (p.drift > 0.0) {
    double amp[3], phase[3];
    for (int k = 0; k < 3; k++) {
      amp[k] = drift_rng.uniform(-1.0, 1.0);
      phase[k] = drift_rng.uniform(0.0, kTwoPi);
    }
    double peak = 0.0;
    for (int i = 0; i < height; i++) {
      double s = 0.0;
      for (int k = 0; k < 3; k++) s += amp[k] * std::sin(kTwoPi * (k + 1) * i / double(height) + phase[k]);
      profile[size_t(i)] = s;
      peak = std::max(peak, std::abs(s));
    }
    if (peak > 0.0)
      for (double& s : profile) s /= peak;
  }

  Plane out(width, height);
  for (int i = 0; i < height; i++) {
    const double m = 1.0 + p.drift * profile[size_t(i)];
    for (int j = 0; j < width; j++) out.at(i, j) = float(m * col[size_t(j)]);
  }
  return out;
}

Plane gen_wave_noise(int width, int height, const WaveNoiseParams& p) {
  if (width < 1 || height < 1) fail("io.dimension", "wave noise: dims must be >= 1");
  if (p.amplitude < 0.0) fail("config.invalid", "wave noise: amplitude must be >= 0");
  for (const double t : p.periods)
    if (t < 2.0) fail("config.invalid", "wave noise: every period must be >= 2");

  Rng rng(p.seed);
  // Per-component column phase walks.
  std::vector<std::vector<double>> phases(p.periods.size(), std::vector<double>(size_t(width)));
  for (size_t k = 0; k < p.periods.size(); k++) {
    Rng walk = rng.split(k + 1);
    double phi = walk.uniform(0.0, kTwoPi);
    for (int j = 0; j < width; j++) {
      phases[k][size_t(j)] = phi;
      phi += walk.normal(0.0, p.phase_jitter);
    }
  }

  Plane out(width, height);
  for (int i = 0; i < height; i++) {
    for (int j = 0; j < width; j++) {
      double v = 0.0;
      for (size_t k = 0; k < p.periods.size(); k++)
        v += std::sin(kTwoPi * i / p.periods[k] + phases[k][size_t(j)]);
      out.at(i, j) = float(p.amplitude * v);
    }
  }
  return out;
}

std::pair<MultiBandRaster, MultiBandRaster> make_synthetic_pair(const MultiBandRaster& clean,
                                                                const Plane& noise, int band) {
  if (noise.width != clean.width || noise.height != clean.height)
    fail("io.dimension", "synthetic pair: noise plane size mismatch");
  if (band < 0 || band >= clean.bands) fail("io.dimension", "synthetic pair: band out of range");
  MultiBandRaster noisy = clean;
  float* dst = noisy.band(band);
  for (size_t i = 0; i < noise.samples.size(); i++) dst[i] += noise.samples[i];
  return {clip_to_range(noisy), clean};
}

Plane gen_texture(int width, int height, uint64_t seed, double range_lo, double range_hi) {
  Rng rng(seed);
  struct Octave {
    int spacing;
    double amplitude;
  };
  const Octave octaves[] = {{128, 1.0}, {32, 0.35}, {16, 0.08}};

  std::vector<double> acc(size_t(width) * height, 0.0);
  for (const auto& [spacing, amplitude] : octaves) {
    const int gw = width / spacing + 2, gh = height / spacing + 2;
    std::vector<double> lattice(size_t(gw) * gh);
    Rng lat_rng = rng.split(uint64_t(spacing));
    for (double& v : lattice) v = lat_rng.uniform(-1.0, 1.0);
    auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
    for (int r = 0; r < height; r++) {
      const int gy = r / spacing;
      const double ty = smooth(double(r % spacing) / spacing);
      for (int c = 0; c < width; c++) {
        const int gx = c / spacing;
        const double tx = smooth(double(c % spacing) / spacing);
        const double v00 = lattice[size_t(gy) * gw + gx];
        const double v01 = lattice[size_t(gy) * gw + gx + 1];
        const double v10 = lattice[size_t(gy + 1) * gw + gx];
        const double v11 = lattice[size_t(gy + 1) * gw + gx + 1];
        const double v = (v00 * (1 - tx) + v01 * tx) * (1 - ty) + (v10 * (1 - tx) + v11 * tx) * ty;
        acc[size_t(r) * width + c] += amplitude * v;
      }
    }
  }

  // Gentle global gradient so scenes are not statistically flat.
  const double gx = rng.uniform(-0.4, 0.4), gy = rng.uniform(-0.4, 0.4);
  for (int r = 0; r < height; r++)
    for (int c = 0; c < width; c++)
      acc[size_t(r) * width + c] += gx * c / double(width) + gy * r / double(height);

  double lo = acc[0], hi = acc[0];
  for (const double v : acc) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = (hi > lo) ? (range_hi - range_lo) / (hi - lo) : 0.0;
  Plane out(width, height);
  for (size_t i = 0; i < out.samples.size(); i++)
    out.samples[i] = float(range_lo + (acc[i] - lo) * scale);
  return out;
}

}  // namespace wavden
