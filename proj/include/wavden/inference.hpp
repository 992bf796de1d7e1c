#pragma once

#include <utility>
#include <vector>

#include "wavden/checkpoint.hpp"
#include "wavden/data_pipeline.hpp"

namespace wavden {

// Half-overlap core tiling: tiles of `tile` px at stride `stride` = tile/2;
// only the centered stride x stride core of each processed tile is kept, so
// every output pixel comes from exactly one tile and seams carry no averaging.
struct TileLayout {
  int tile = 128;
  int stride = 64;

  int margin() const { return (tile - stride) / 2; }
  void validate() const {
    if (stride != tile / 2 || tile < 2 || tile % 2 != 0)
      fail("tile.layout", "stride must be tile/2");
  }
};

// Row-major grid of tiles covering the scene, reflect-extended at borders so
// the core grid covers every pixel.
std::vector<Plane> cut_tiles(const Plane& scene, const TileLayout& layout);

// Inverse of cut_tiles for processed tiles: writes each core pixel once.
Plane assemble_tiles(const std::vector<Plane>& tiles, const TileLayout& layout, int width,
                     int height);

// Elementwise sub_noisy - sub_denoised.
Plane estimate_noise(const Plane& sub_noisy, const Plane& sub_denoised);

// Inference-ready model deserialized from a training checkpoint.
struct DenoiseModel {
  nn::ParamSet<float> params;  // all checkpoint tensors; "G.*" drives inference
  nn::GeneratorConfig gen;
  NoiseMode mode = NoiseMode::Stripe;
  SubbandPipelineConfig pipeline;
  double data_scale = 1.0;
  int patch_width = 2048;  // stripe inference window width
  int patch_height = 32;
};

DenoiseModel model_from_checkpoint(const Checkpoint& ckpt);

// Vertical-stripe flow: HL-subband projection, x32 vertical downsample,
// generator, noise upsample, subtraction, clip. Returns the clipped scene and
// the full-resolution noise estimate (exact complement of the clean output).
std::pair<MultiBandRaster, Plane> destripe_scene(const MultiBandRaster& raster,
                                                 const DenoiseModel& model);

// Wave flow on registered RGBN: per-channel LH-subband stacks, 128/64 core
// tiling, noise taken from the green channel only; other bands pass through
// bitwise.
std::pair<MultiBandRaster, Plane> dewave_scene(const MultiBandRaster& raster,
                                               const DenoiseModel& model);

// Classical per-column moment matching against global image statistics.
Plane moment_match_destripe(const Plane& p);

}  // namespace wavden
