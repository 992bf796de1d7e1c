#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wavden/wavelet.hpp"

using namespace wavden;
using testutil::max_abs;
using testutil::max_abs_diff;
using testutil::random_plane;

namespace {

SubbandSelection all_bands(int k) {
  SubbandSelection sel;
  for (int lv = 1; lv <= k; lv++)
    for (const Subband b : {Subband::LH, Subband::HL, Subband::HH}) sel.kept.emplace_back(lv, b);
  sel.kept.emplace_back(k, Subband::LL);
  return sel;
}

double pyramid_energy(const WaveletPyramid& pyr) {
  double e = plane_energy(pyr.approx);
  for (const auto& d : pyr.details) e += plane_energy(d.lh) + plane_energy(d.hl) + plane_energy(d.hh);
  return e;
}

}  // namespace

TEST_CASE("constant plane concentrates in the approximation") {
  const float c = 123.25f;
  for (const int k : {1, 3, 5}) {
    Plane p(64, 64, c);
    const WaveletPyramid pyr = dwt2_multilevel(p, k);
    const double scale = std::pow(2.0, k);
    for (const float v : pyr.approx.samples) CHECK(std::abs(v - scale * c) < 1e-2);
    for (const auto& d : pyr.details) {
      CHECK(max_abs(d.lh) < 1e-4 * c);
      CHECK(max_abs(d.hl) < 1e-4 * c);
      CHECK(max_abs(d.hh) < 1e-4 * c);
    }
  }
}

TEST_CASE("dyadic size arithmetic at depth 9") {
  const Plane p = random_plane(512, 512, 11);
  const WaveletPyramid pyr = dwt2_multilevel(p, 9);
  CHECK(pyr.approx.width == 1);
  CHECK(pyr.approx.height == 1);
  CHECK(pyr.details[0].lh.width == 256);
  CHECK(pyr.details[0].lh.height == 256);
  CHECK(pyr.details[8].hh.width == 1);
}

TEST_CASE("column-constant plane has no LH/HH energy") {
  Plane p(128, 128);
  Rng rng(3);
  for (int j = 0; j < 128; j++) {
    const float v = float(rng.uniform(-500.0, 500.0));
    for (int i = 0; i < 128; i++) p.at(i, j) = v;
  }
  const double total = plane_energy(p);
  const WaveletPyramid pyr = dwt2_multilevel(p, 5);
  double off = 0.0;
  for (const auto& d : pyr.details) off += plane_energy(d.lh) + plane_energy(d.hh);
  CHECK(off < 1e-8 * total);
}

TEST_CASE("row-constant plane has no HL/HH energy") {
  Plane p(128, 128);
  Rng rng(4);
  for (int i = 0; i < 128; i++) {
    const float v = float(rng.uniform(-500.0, 500.0));
    for (int j = 0; j < 128; j++) p.at(i, j) = v;
  }
  const double total = plane_energy(p);
  const WaveletPyramid pyr = dwt2_multilevel(p, 5);
  double off = 0.0;
  for (const auto& d : pyr.details) off += plane_energy(d.hl) + plane_energy(d.hh);
  CHECK(off < 1e-8 * total);
}

TEST_CASE("perfect reconstruction across depths") {
  for (const int k : {1, 6, 9}) {
    const Plane p = random_plane(256, 256, 100 + uint64_t(k));
    const Plane back = idwt2_multilevel(dwt2_multilevel(p, k));
    REQUIRE(back.width == 256);
    REQUIRE(back.height == 256);
    CHECK(max_abs_diff(p, back) < 1e-4 * std::max(1.0, max_abs(p)));
  }
}

TEST_CASE("perfect reconstruction on non-dyadic sizes") {
  for (const auto [w, h, k] : {std::tuple{300, 200, 3}, {97, 65, 4}, {33, 512, 5}}) {
    const Plane p = random_plane(w, h, uint64_t(w * 1000 + h));
    const Plane back = idwt2_multilevel(dwt2_multilevel(p, k));
    REQUIRE(back.width == w);
    REQUIRE(back.height == h);
    CHECK(max_abs_diff(p, back) < 1e-4 * std::max(1.0, max_abs(p)));
  }
}

TEST_CASE("zero pyramid and scaling linearity") {
  const Plane p = random_plane(64, 64, 5);
  WaveletPyramid pyr = dwt2_multilevel(p, 3);

  WaveletPyramid zero = pyr;
  std::fill(zero.approx.samples.begin(), zero.approx.samples.end(), 0.0f);
  for (auto& d : zero.details)
    for (Plane* pl : {&d.lh, &d.hl, &d.hh}) std::fill(pl->samples.begin(), pl->samples.end(), 0.0f);
  CHECK(max_abs(idwt2_multilevel(zero)) == 0.0);

  const float alpha = 2.5f;
  WaveletPyramid scaled = pyr;
  for (auto& v : scaled.approx.samples) v *= alpha;
  for (auto& d : scaled.details)
    for (Plane* pl : {&d.lh, &d.hl, &d.hh})
      for (auto& v : pl->samples) v *= alpha;
  const Plane a = idwt2_multilevel(scaled);
  const Plane b = idwt2_multilevel(pyr);
  const double mag = std::max(1.0, double(alpha) * max_abs(b));
  for (size_t i = 0; i < a.samples.size(); i++) {
    const double expect = alpha * double(b.samples[i]);
    CHECK(std::abs(a.samples[i] - expect) <= 1e-6 * mag);
  }
}

TEST_CASE("transform linearity") {
  const Plane p = random_plane(64, 64, 21);
  const Plane q = random_plane(64, 64, 22);
  Plane combo(64, 64);
  const float alpha = 1.5f, beta = -0.75f;
  for (size_t i = 0; i < combo.samples.size(); i++)
    combo.samples[i] = alpha * p.samples[i] + beta * q.samples[i];
  const WaveletPyramid pc = dwt2_multilevel(combo, 4);
  const WaveletPyramid pp = dwt2_multilevel(p, 4);
  const WaveletPyramid pq = dwt2_multilevel(q, 4);
  for (size_t i = 0; i < pc.approx.samples.size(); i++) {
    const double expect = alpha * double(pp.approx.samples[i]) + beta * double(pq.approx.samples[i]);
    CHECK(std::abs(pc.approx.samples[i] - expect) <= 1e-4 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("parseval under periodic boundary") {
  const Plane p = random_plane(256, 256, 31);
  const WaveletPyramid pyr = dwt2_multilevel(p, 6);
  const double plane_e = plane_energy(p);
  const double coef_e = pyramid_energy(pyr);
  CHECK(std::abs(plane_e - coef_e) < 1e-3 * plane_e);
}

TEST_CASE("projection with all subbands is the identity") {
  const Plane p = random_plane(128, 128, 41);
  const Plane back = subband_project(p, 4, all_bands(4));
  CHECK(max_abs_diff(p, back) < 1e-4 * std::max(1.0, max_abs(p)));
}

TEST_CASE("stripe plane lives in HL plus LL") {
  Plane p(512, 512);
  Rng rng(55);
  for (int j = 0; j < 512; j++) {
    const float v = float(rng.uniform(0.0, 2000.0));
    for (int i = 0; i < 512; i++) p.at(i, j) = v;
  }
  const Plane proj = subband_project(p, 9, SubbandSelection::range(Subband::HL, 1, 9, true, 9));
  CHECK(max_abs_diff(p, proj) < 1e-4 * max_abs(p));
}

TEST_CASE("complementary selections sum to the input") {
  const Plane p = random_plane(256, 256, 61);
  Rng rng(62);
  const int k = 4;
  for (int trial = 0; trial < 8; trial++) {
    SubbandSelection sel, complement;
    for (int lv = 1; lv <= k; lv++) {
      for (const Subband b : {Subband::LH, Subband::HL, Subband::HH}) {
        (rng.coin() ? sel : complement).kept.emplace_back(lv, b);
      }
    }
    (rng.coin() ? sel : complement).kept.emplace_back(k, Subband::LL);
    if (sel.kept.empty() || complement.kept.empty()) continue;
    const Plane a = subband_project(p, k, sel);
    const Plane b = subband_project(p, k, complement);
    Plane sum(256, 256);
    for (size_t i = 0; i < sum.samples.size(); i++) sum.samples[i] = a.samples[i] + b.samples[i];
    CHECK(max_abs_diff(p, sum) < 1e-4 * std::max(1.0, max_abs(p)));
  }
}

TEST_CASE("level and structure validation") {
  const Plane tiny = random_plane(2, 2, 71);
  CHECK_THROWS_WITH_AS(dwt2_multilevel(tiny, 9), doctest::Contains("wavelet.level"), Error);
  CHECK_THROWS_WITH_AS(dwt2_multilevel(tiny, 0), doctest::Contains("wavelet.level"), Error);

  WaveletPyramid pyr = dwt2_multilevel(random_plane(64, 64, 72), 3);
  pyr.details[1].hl = Plane(5, 5);
  CHECK_THROWS_WITH_AS(idwt2_multilevel(pyr), doctest::Contains("wavelet.structure"), Error);
}

TEST_CASE("selection parsing and constraints") {
  const SubbandSelection sel = SubbandSelection::parse("HL:1-9,LL:9");
  CHECK(sel.contains(1, Subband::HL));
  CHECK(sel.contains(9, Subband::HL));
  CHECK(sel.contains(9, Subband::LL));
  CHECK(!sel.contains(2, Subband::LH));
  sel.validate(9);
  CHECK_THROWS_WITH_AS(sel.validate(8), doctest::Contains("config.invalid"), Error);

  CHECK_THROWS_WITH_AS(SubbandSelection::parse("XX:1-2"), doctest::Contains("config.invalid"),
                       Error);
  CHECK_THROWS_WITH_AS(SubbandSelection::parse("HL:9-1"), doctest::Contains("config.invalid"),
                       Error);
  // LL below the deepest level is invalid
  CHECK_THROWS_WITH_AS(SubbandSelection::parse("LL:2").validate(6),
                       doctest::Contains("config.invalid"), Error);
}
