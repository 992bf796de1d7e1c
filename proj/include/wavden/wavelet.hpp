#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wavden/plane.hpp"

namespace wavden {

// Subband naming: first letter is the filter applied along the horizontal
// axis, second letter along the vertical axis. HL (high-pass horizontal,
// low-pass vertical) captures vertical structures such as column stripes;
// LH captures horizontal structures such as wave banding.
enum class Subband { LL, LH, HL, HH };

const char* subband_name(Subband b);

// Set of (level, orientation) subbands kept by a projection. LL is only
// meaningful at the deepest level of a K-level decomposition.
struct SubbandSelection {
  std::vector<std::pair<int, Subband>> kept;

  bool contains(int level, Subband b) const;
  void validate(int levels) const;

  // Parses strings like "HL:1-9", "LH:1-6,LL:6", "HH:3". Levels are 1-based
  // and inclusive on both range ends.
  static SubbandSelection parse(const std::string& text);

  static SubbandSelection range(Subband b, int from, int to, bool with_ll = false, int ll_level = 0);
};

// K-level decimated db3 decomposition of one plane (periodic boundary).
// Planes are stored at level i with dimensions padded/2^i, where the input
// was reflect-padded up to the next multiple of 2^K.
struct WaveletPyramid {
  int levels = 0;
  int original_width = 0, original_height = 0;
  int padded_width = 0, padded_height = 0;
  Plane approx;  // LL_K
  struct DetailLevel {
    Plane lh, hl, hh;
  };
  std::vector<DetailLevel> details;  // details[0] is level 1 (finest)
};

WaveletPyramid dwt2_multilevel(const Plane& p, int levels);
Plane idwt2_multilevel(const WaveletPyramid& pyr);

// Reconstruction from the selected subbands with all others zeroed: the
// "wavelet subband image". Same size as the input.
Plane subband_project(const Plane& p, int levels, const SubbandSelection& sel);

double plane_energy(const Plane& p);  // sum of squares, 64-bit accumulation

}  // namespace wavden
