#include "wavden/wavelet.hpp"

#include <array>
#include <cctype>
#include <cmath>

namespace wavden {

namespace {

// Orthonormal db3 scaling filter; the wavelet filter is the alternating flip
// g[k] = (-1)^k h[5-k]. Coefficients sum to sqrt(2).
constexpr std::array<double, 6> kDb3 = {
    0.3326705529509569,  0.8068915093133388,  0.4598775021193313,
    -0.13501102001039084, -0.08544127388224149, 0.035226291882100656};

constexpr int kTaps = 6;

double lowpass(int k) { return kDb3[size_t(k)]; }
double highpass(int k) { return (k % 2 == 0 ? 1.0 : -1.0) * kDb3[size_t(kTaps - 1 - k)]; }

// Periodic analysis of one length-n signal (stride-aware so rows and columns
// share the code path). Accumulates each coefficient in double.
void analyze(const float* x, int n, size_t stride, float* lo, float* hi, size_t out_stride) {
  const int half = n / 2;
  for (int m = 0; m < half; m++) {
    double a = 0.0, d = 0.0;
    for (int k = 0; k < kTaps; k++) {
      const int idx = (2 * m + k) % n;
      const double v = x[size_t(idx) * stride];
      a += lowpass(k) * v;
      d += highpass(k) * v;
    }
    lo[size_t(m) * out_stride] = float(a);
    hi[size_t(m) * out_stride] = float(d);
  }
}

// Periodic synthesis, the transpose of analyze.
void synthesize(const float* lo, const float* hi, int half, size_t in_stride, float* x,
                size_t stride) {
  const int n = 2 * half;
  std::vector<double> acc(size_t(n), 0.0);
  for (int m = 0; m < half; m++) {
    const double a = lo[size_t(m) * in_stride];
    const double d = hi[size_t(m) * in_stride];
    for (int k = 0; k < kTaps; k++) {
      acc[size_t((2 * m + k) % n)] += lowpass(k) * a + highpass(k) * d;
    }
  }
  for (int i = 0; i < n; i++) x[size_t(i) * stride] = float(acc[size_t(i)]);
}

// One 2D analysis level: rows first (horizontal axis), then columns.
// Quadrants in the output plane: [LL | HL ; LH | HH] with the horizontal
// filter selecting the left/right half and the vertical filter top/bottom.
void level_forward(Plane& p) {
  const int w = p.width, h = p.height;
  std::vector<float> row(size_t(w), 0.0f);
  for (int r = 0; r < h; r++) {
    float* base = p.samples.data() + size_t(r) * w;
    std::copy(base, base + w, row.begin());
    analyze(row.data(), w, 1, base, base + w / 2, 1);
  }
  std::vector<float> col(size_t(h), 0.0f);
  for (int c = 0; c < w; c++) {
    float* base = p.samples.data() + c;
    for (int r = 0; r < h; r++) col[size_t(r)] = base[size_t(r) * w];
    analyze(col.data(), h, 1, base, base + size_t(h / 2) * w, size_t(w));
  }
}

void level_inverse(Plane& p) {
  const int w = p.width, h = p.height;
  std::vector<float> col(size_t(h), 0.0f);
  for (int c = 0; c < w; c++) {
    float* base = p.samples.data() + c;
    for (int r = 0; r < h; r++) col[size_t(r)] = base[size_t(r) * w];
    synthesize(col.data(), col.data() + h / 2, h / 2, 1, base, size_t(w));
  }
  std::vector<float> row(size_t(w), 0.0f);
  for (int r = 0; r < h; r++) {
    float* base = p.samples.data() + size_t(r) * w;
    std::copy(base, base + w, row.begin());
    synthesize(row.data(), row.data() + w / 2, w / 2, 1, base, 1);
  }
}

int pad_up(int n, int multiple) { return ((n + multiple - 1) / multiple) * multiple; }

// Symmetric (reflected, edge included) extension index with period 2n.
int mirror_index(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

Plane reflect_pad(const Plane& p, int pw, int ph) {
  if (pw == p.width && ph == p.height) return p;
  Plane out(pw, ph);
  for (int r = 0; r < ph; r++) {
    const int sr = mirror_index(r, p.height);
    for (int c = 0; c < pw; c++) out.at(r, c) = p.at(sr, mirror_index(c, p.width));
  }
  return out;
}

void check_levels(const Plane& p, int levels) {
  if (levels < 1) fail("wavelet.level", "level count must be >= 1");
  const int longest = std::max(p.width, p.height);
  if ((levels >= 31) || ((1 << levels) > 4 * longest))
    fail("wavelet.level", "level " + std::to_string(levels) + " too large for a " +
                              std::to_string(p.width) + "x" + std::to_string(p.height) + " plane");
}

Subband parse_band(const std::string& s) {
  if (s == "LL") return Subband::LL;
  if (s == "LH") return Subband::LH;
  if (s == "HL") return Subband::HL;
  if (s == "HH") return Subband::HH;
  fail("config.invalid", "unknown subband '" + s + "'");
}

}  // namespace

const char* subband_name(Subband b) {
  switch (b) {
    case Subband::LL: return "LL";
    case Subband::LH: return "LH";
    case Subband::HL: return "HL";
    case Subband::HH: return "HH";
  }
  return "?";
}

bool SubbandSelection::contains(int level, Subband b) const {
  for (const auto& [lv, sb] : kept)
    if (lv == level && sb == b) return true;
  return false;
}

void SubbandSelection::validate(int levels) const {
  for (const auto& [lv, sb] : kept) {
    if (lv < 1 || lv > levels)
      fail("config.invalid", std::string(subband_name(sb)) + ":" + std::to_string(lv) +
                                 " outside 1.." + std::to_string(levels));
    if (sb == Subband::LL && lv != levels)
      fail("config.invalid", "LL may only appear at the deepest level");
  }
}

SubbandSelection SubbandSelection::parse(const std::string& text) {
  SubbandSelection sel;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const size_t colon = item.find(':');
    if (colon == std::string::npos) fail("config.invalid", "selection item '" + item + "' lacks ':'");
    const Subband band = parse_band(item.substr(0, colon));
    const std::string range = item.substr(colon + 1);
    const size_t dash = range.find('-');
    int from = 0, to = 0;
    try {
      if (dash == std::string::npos) {
        from = to = std::stoi(range);
      } else {
        from = std::stoi(range.substr(0, dash));
        to = std::stoi(range.substr(dash + 1));
      }
    } catch (const std::exception&) {
      fail("config.invalid", "bad level range '" + range + "'");
    }
    if (from < 1 || to < from) fail("config.invalid", "bad level range '" + range + "'");
    for (int lv = from; lv <= to; lv++) sel.kept.emplace_back(lv, band);
    pos = comma + 1;
  }
  if (sel.kept.empty()) fail("config.invalid", "empty subband selection");
  return sel;
}

SubbandSelection SubbandSelection::range(Subband b, int from, int to, bool with_ll, int ll_level) {
  SubbandSelection sel;
  for (int lv = from; lv <= to; lv++) sel.kept.emplace_back(lv, b);
  if (with_ll) sel.kept.emplace_back(ll_level, Subband::LL);
  return sel;
}

WaveletPyramid dwt2_multilevel(const Plane& p, int levels) {
  check_levels(p, levels);
  WaveletPyramid pyr;
  pyr.levels = levels;
  pyr.original_width = p.width;
  pyr.original_height = p.height;
  pyr.padded_width = pad_up(p.width, 1 << levels);
  pyr.padded_height = pad_up(p.height, 1 << levels);

  Plane work = reflect_pad(p, pyr.padded_width, pyr.padded_height);
  pyr.details.resize(size_t(levels));
  for (int lv = 1; lv <= levels; lv++) {
    level_forward(work);
    const int hw = work.width / 2, hh = work.height / 2;
    auto& d = pyr.details[size_t(lv - 1)];
    d.lh = Plane(hw, hh);
    d.hl = Plane(hw, hh);
    d.hh = Plane(hw, hh);
    Plane next(hw, hh);
    for (int r = 0; r < hh; r++) {
      for (int c = 0; c < hw; c++) {
        next.at(r, c) = work.at(r, c);
        d.hl.at(r, c) = work.at(r, c + hw);
        d.lh.at(r, c) = work.at(r + hh, c);
        d.hh.at(r, c) = work.at(r + hh, c + hw);
      }
    }
    work = std::move(next);
  }
  pyr.approx = std::move(work);
  return pyr;
}

namespace {

void check_structure(const WaveletPyramid& pyr) {
  if (pyr.levels < 1 || int(pyr.details.size()) != pyr.levels)
    fail("wavelet.structure", "detail level count does not match declared levels");
  if (pyr.padded_width % (1 << pyr.levels) != 0 || pyr.padded_height % (1 << pyr.levels) != 0)
    fail("wavelet.structure", "padded dimensions not divisible by 2^levels");
  for (int lv = 1; lv <= pyr.levels; lv++) {
    const int ew = pyr.padded_width >> lv, eh = pyr.padded_height >> lv;
    const auto& d = pyr.details[size_t(lv - 1)];
    for (const Plane* pl : {&d.lh, &d.hl, &d.hh}) {
      if (pl->width != ew || pl->height != eh)
        fail("wavelet.structure", "level " + std::to_string(lv) + " detail plane is " +
                                      std::to_string(pl->width) + "x" + std::to_string(pl->height) +
                                      ", expected " + std::to_string(ew) + "x" + std::to_string(eh));
    }
  }
  const int aw = pyr.padded_width >> pyr.levels, ah = pyr.padded_height >> pyr.levels;
  if (pyr.approx.width != aw || pyr.approx.height != ah)
    fail("wavelet.structure", "approximation plane size mismatch");
}

}  // namespace

Plane idwt2_multilevel(const WaveletPyramid& pyr) {
  check_structure(pyr);
  Plane work = pyr.approx;
  for (int lv = pyr.levels; lv >= 1; lv--) {
    const auto& d = pyr.details[size_t(lv - 1)];
    const int hw = work.width, hh = work.height;
    Plane merged(hw * 2, hh * 2);
    for (int r = 0; r < hh; r++) {
      for (int c = 0; c < hw; c++) {
        merged.at(r, c) = work.at(r, c);
        merged.at(r, c + hw) = d.hl.at(r, c);
        merged.at(r + hh, c) = d.lh.at(r, c);
        merged.at(r + hh, c + hw) = d.hh.at(r, c);
      }
    }
    level_inverse(merged);
    work = std::move(merged);
  }
  if (work.width == pyr.original_width && work.height == pyr.original_height) return work;
  Plane out(pyr.original_width, pyr.original_height);
  for (int r = 0; r < out.height; r++)
    for (int c = 0; c < out.width; c++) out.at(r, c) = work.at(r, c);
  return out;
}

Plane subband_project(const Plane& p, int levels, const SubbandSelection& sel) {
  sel.validate(levels);
  WaveletPyramid pyr = dwt2_multilevel(p, levels);
  for (int lv = 1; lv <= levels; lv++) {
    auto& d = pyr.details[size_t(lv - 1)];
    if (!sel.contains(lv, Subband::LH)) std::fill(d.lh.samples.begin(), d.lh.samples.end(), 0.0f);
    if (!sel.contains(lv, Subband::HL)) std::fill(d.hl.samples.begin(), d.hl.samples.end(), 0.0f);
    if (!sel.contains(lv, Subband::HH)) std::fill(d.hh.samples.begin(), d.hh.samples.end(), 0.0f);
  }
  if (!sel.contains(levels, Subband::LL))
    std::fill(pyr.approx.samples.begin(), pyr.approx.samples.end(), 0.0f);
  return idwt2_multilevel(pyr);
}

double plane_energy(const Plane& p) {
  double e = 0.0;
  for (const float s : p.samples) e += double(s) * double(s);
  return e;
}

}  // namespace wavden
