#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wavden/metrics.hpp"

using namespace wavden;
using testutil::random_plane;

TEST_CASE("psnr closed forms") {
  const Plane a = random_plane(32, 32, 1, 1000.0, 60000.0);
  CHECK(std::isinf(psnr(a, a, 65535.0)));

  Plane b = a;
  for (auto& v : b.samples) v += 1.0f;
  // MSE = 1 -> PSNR = 20 log10(65535)
  const double expect1 = 10.0 * std::log10(65535.0 * 65535.0);
  CHECK(psnr(a, b, 65535.0) == doctest::Approx(expect1).epsilon(1e-6));
  CHECK(expect1 == doctest::Approx(96.329).epsilon(1e-4));

  Plane c = a;
  for (auto& v : c.samples) v += 256.0f;
  const double expect256 = 10.0 * std::log10(65535.0 * 65535.0 / (256.0 * 256.0));
  CHECK(psnr(a, c, 65535.0) == doctest::Approx(expect256).epsilon(1e-6));
  CHECK(expect256 == doctest::Approx(48.165).epsilon(1e-4));
}

TEST_CASE("psnr is symmetric and monotone in noise amplitude") {
  const Plane a = random_plane(64, 64, 2, 1000.0, 60000.0);
  Rng rng(3);
  double prev = std::numeric_limits<double>::infinity();
  for (const double amp : {1.0, 4.0, 16.0}) {
    Plane b = a;
    Rng r2(7);
    for (auto& v : b.samples) v += float(r2.uniform(-amp, amp));
    const double p1 = psnr(a, b, 65535.0);
    CHECK(p1 == psnr(b, a, 65535.0));
    CHECK(p1 < prev);
    prev = p1;
  }
}

TEST_CASE("ssim of identical planes is exactly one") {
  const Plane a = random_plane(32, 48, 5, 0.0, 65535.0);
  CHECK(ssim(a, a) == 1.0);
}

TEST_CASE("ssim of an anti-correlated plane is negative") {
  // b = -a + const with a zero-mean: structure term flips sign.
  Plane a = random_plane(64, 64, 8, -5000.0, 5000.0);
  Plane b(64, 64);
  for (size_t i = 0; i < a.samples.size(); i++) b.samples[i] = -a.samples[i] + 30000.0f;
  Plane a_shift = a;
  for (auto& v : a_shift.samples) v += 30000.0f;
  CHECK(ssim(a_shift, b) < 0.0);
}

TEST_CASE("constant offset only dents the luminance term") {
  const Plane a = random_plane(64, 64, 9, 20000.0, 40000.0);
  Plane b = a;
  for (auto& v : b.samples) v += 100.0f;
  const double s = ssim(a, b);
  CHECK(s > 0.99);
  CHECK(s <= 1.0);

  // Oracle: with identical variances and covariance == variance, each local
  // term reduces to the closed-form luminance factor.
  const double c1 = (0.01 * 65535.0) * (0.01 * 65535.0);
  const double mu = 30000.0, mu2 = 30100.0;  // representative window means
  const double lum = (2.0 * mu * mu2 + c1) / (mu * mu + mu2 * mu2 + c1);
  CHECK(s == doctest::Approx(lum).epsilon(2e-4));
}

TEST_CASE("ssim rejects undersized planes") {
  const Plane small = random_plane(8, 8, 10);
  CHECK_THROWS_WITH_AS(ssim(small, small), doctest::Contains("io.dimension"), Error);
}
