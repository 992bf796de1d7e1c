#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wavden/data_pipeline.hpp"
#include "wavden/noise_synth.hpp"
#include "wavden/wavelet.hpp"

using namespace wavden;
using testutil::max_abs;

TEST_CASE("stripe noise basics") {
  StripeNoiseParams p;
  p.sigma = 0.0;
  CHECK(max_abs(gen_stripe_noise(64, 64, p)) == 0.0);

  p.sigma = 500.0;
  p.drift = 0.0;
  p.seed = 9;
  const Plane n = gen_stripe_noise(64, 64, p);
  for (int i = 1; i < n.height; i++)
    for (int j = 0; j < n.width; j++) CHECK(n.at(i, j) == n.at(0, j));

  const Plane again = gen_stripe_noise(64, 64, p);
  CHECK(n.samples == again.samples);
  p.seed = 10;
  CHECK(gen_stripe_noise(64, 64, p).samples != n.samples);
}

TEST_CASE("stripe noise with drift modulates but stays bounded") {
  StripeNoiseParams p;
  p.sigma = 500.0;
  p.drift = 0.3;
  p.seed = 12;
  const Plane n = gen_stripe_noise(64, 256, p);
  p.drift = 0.0;
  const Plane base = gen_stripe_noise(64, 256, p);
  for (int i = 0; i < n.height; i++)
    for (int j = 0; j < n.width; j++)
      CHECK(std::abs(n.at(i, j)) <= 1.3 * std::abs(base.at(0, j)) + 1e-3);
}

TEST_CASE("drift-free stripe noise survives the x32 round trip exactly") {
  StripeNoiseParams p;
  p.sigma = 800.0;
  p.corr_len = 3;
  p.seed = 21;
  const Plane n = gen_stripe_noise(512, 512, p);
  const Plane down = downsample_vertical(n, 32);
  const Plane up = upsample_vertical(down, 32, 512);
  CHECK(up.samples == n.samples);
}

TEST_CASE("stripe noise mean shrinks with width") {
  for (const uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    StripeNoiseParams p;
    p.sigma = 1000.0;
    p.corr_len = 1;
    p.seed = seed;
    const Plane n = gen_stripe_noise(4096, 4, p);
    double mean = 0.0;
    for (const float v : n.samples) mean += v;
    mean /= double(n.samples.size());
    CHECK(std::abs(mean) < 3.0 * p.sigma / std::sqrt(4096.0));
  }
}

TEST_CASE("stripe noise concentrates in HL plus LL") {
  for (const uint64_t seed : {31u, 32u, 33u}) {
    StripeNoiseParams p;
    p.sigma = 1000.0;
    p.corr_len = 4;
    p.seed = seed;
    const Plane n = gen_stripe_noise(512, 512, p);
    const Plane proj = subband_project(n, 9, SubbandSelection::range(Subband::HL, 1, 9, true, 9));
    CHECK(plane_energy(proj) >= 0.99 * plane_energy(n));
  }
}

TEST_CASE("wave noise basics") {
  WaveNoiseParams p;
  p.amplitude = 0.0;
  CHECK(max_abs(gen_wave_noise(32, 32, p)) == 0.0);

  p.amplitude = 300.0;
  p.periods = {8.0};
  p.phase_jitter = 0.0;
  p.seed = 3;
  const Plane n = gen_wave_noise(64, 64, p);
  for (int i = 0; i < n.height; i++)
    for (int j = 1; j < n.width; j++) CHECK(n.at(i, j) == n.at(i, 0));
  // column is periodic with period 8
  for (int i = 0; i + 8 < n.height; i++)
    CHECK(n.at(i, 0) == doctest::Approx(n.at(i + 8, 0)).epsilon(1e-4));

  CHECK_THROWS_WITH_AS(gen_wave_noise(8, 8, WaveNoiseParams{1.0, {1.5}, 0.0, 0}),
                       doctest::Contains("config.invalid"), Error);
}

// DERIVED oracle: the LH:1-6 energy fraction measured over a period/seed
// sweep. The 0.9 bound below was fixed from this sweep's observed minimum.
TEST_CASE("wave noise energy concentrates in LH 1-6") {
  double min_frac = 1.0;
  for (const double period : {4.0, 8.0, 16.0, 32.0, 64.0}) {
    for (const uint64_t seed : {41u, 42u}) {
      WaveNoiseParams p;
      p.amplitude = 500.0;
      p.periods = {period};
      p.phase_jitter = 0.03;
      p.seed = seed;
      const Plane n = gen_wave_noise(256, 256, p);
      const Plane proj = subband_project(n, 6, SubbandSelection::range(Subband::LH, 1, 6));
      min_frac = std::min(min_frac, plane_energy(proj) / plane_energy(n));
    }
  }
  // mixed-period default parameters as used by the synth command
  WaveNoiseParams mix;
  mix.amplitude = 500.0;
  mix.seed = 43;
  const Plane n = gen_wave_noise(256, 256, mix);
  const Plane proj = subband_project(n, 6, SubbandSelection::range(Subband::LH, 1, 6));
  min_frac = std::min(min_frac, plane_energy(proj) / plane_energy(n));

  CHECK(min_frac >= 0.9);
}

TEST_CASE("make_synthetic_pair adds, clips, and preserves the truth") {
  MultiBandRaster clean(4, 4, 1, 32768.0f);
  Plane zero(4, 4);
  const auto [same, truth0] = make_synthetic_pair(clean, zero, 0);
  CHECK(same.samples == clean.samples);

  Plane plus100(4, 4, 100.0f);
  const auto [noisy, truth] = make_synthetic_pair(clean, plus100, 0);
  for (const float v : noisy.samples) CHECK(v == 32868.0f);
  CHECK(truth.samples == clean.samples);

  MultiBandRaster bright(4, 4, 1, 65500.0f);
  const auto [clipped, _] = make_synthetic_pair(bright, plus100, 0);
  for (const float v : clipped.samples) CHECK(v == 65535.0f);

  Plane wrong(3, 3);
  CHECK_THROWS_WITH_AS(make_synthetic_pair(clean, wrong, 0), doctest::Contains("io.dimension"),
                       Error);
}

TEST_CASE("textures are deterministic and in range") {
  const Plane a = gen_texture(256, 256, 77);
  const Plane b = gen_texture(256, 256, 77);
  CHECK(a.samples == b.samples);
  CHECK(gen_texture(256, 256, 78).samples != a.samples);
  for (const float v : a.samples) {
    CHECK(v >= 24000.0f);
    CHECK(v <= 37000.0f);
  }
}
