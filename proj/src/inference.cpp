#include "wavden/inference.hpp"

#include <cmath>

#include <json.hpp>

namespace wavden {

namespace {

int mirror_index(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

int div_up(int a, int b) { return (a + b - 1) / b; }

}  // namespace

std::vector<Plane> cut_tiles(const Plane& scene, const TileLayout& layout) {
  layout.validate();
  const int margin = layout.margin();
  const int gw = div_up(scene.width, layout.stride);
  const int gh = div_up(scene.height, layout.stride);
  std::vector<Plane> tiles;
  tiles.reserve(size_t(gw) * gh);
  for (int gy = 0; gy < gh; gy++) {
    for (int gx = 0; gx < gw; gx++) {
      Plane t(layout.tile, layout.tile);
      for (int i = 0; i < layout.tile; i++) {
        const int sy = mirror_index(gy * layout.stride - margin + i, scene.height);
        for (int j = 0; j < layout.tile; j++)
          t.at(i, j) = scene.at(sy, mirror_index(gx * layout.stride - margin + j, scene.width));
      }
      tiles.push_back(std::move(t));
    }
  }
  return tiles;
}

Plane assemble_tiles(const std::vector<Plane>& tiles, const TileLayout& layout, int width,
                     int height) {
  layout.validate();
  const int margin = layout.margin();
  const int gw = div_up(width, layout.stride);
  const int gh = div_up(height, layout.stride);
  if (int(tiles.size()) != gw * gh)
    fail("tile.layout", "expected " + std::to_string(gw * gh) + " tiles for " +
                            std::to_string(width) + "x" + std::to_string(height) + ", got " +
                            std::to_string(tiles.size()));
  Plane out(width, height);
  for (int gy = 0; gy < gh; gy++) {
    for (int gx = 0; gx < gw; gx++) {
      const Plane& t = tiles[size_t(gy) * gw + gx];
      if (t.width != layout.tile || t.height != layout.tile)
        fail("tile.layout", "tile size mismatch");
      for (int i = 0; i < layout.stride; i++) {
        const int oy = gy * layout.stride + i;
        if (oy >= height) break;
        for (int j = 0; j < layout.stride; j++) {
          const int ox = gx * layout.stride + j;
          if (ox >= width) break;
          out.at(oy, ox) = t.at(margin + i, margin + j);
        }
      }
    }
  }
  return out;
}

Plane estimate_noise(const Plane& sub_noisy, const Plane& sub_denoised) {
  if (sub_noisy.width != sub_denoised.width || sub_noisy.height != sub_denoised.height)
    fail("io.dimension", "estimate_noise: plane size mismatch");
  Plane out(sub_noisy.width, sub_noisy.height);
  for (size_t i = 0; i < out.samples.size(); i++)
    out.samples[i] = sub_noisy.samples[i] - sub_denoised.samples[i];
  return out;
}

DenoiseModel model_from_checkpoint(const Checkpoint& ckpt) {
  DenoiseModel m;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ckpt.config_text);
  } catch (const std::exception& e) {
    fail("io.format", std::string("checkpoint config echo: ") + e.what());
  }
  m.mode = parse_mode(j.at("mode").get<std::string>());
  m.gen.in_channels = j.at("gen_in_channels").get<int>();
  m.gen.depth = j.at("depth").get<int>();
  m.gen.base_width = j.at("base_width").get<int>();
  m.gen.max_width = j.at("max_width").get<int>();
  m.data_scale = j.at("data_scale").get<double>();
  m.patch_width = j.at("patch_width").get<int>();
  m.patch_height = j.at("patch_height").get<int>();
  m.pipeline.levels = j.at("levels").get<int>();
  m.pipeline.selection = SubbandSelection::parse(j.at("selection").get<std::string>());
  m.pipeline.downsample = j.at("downsample").get<int>();
  m.params = ckpt.tensors;
  m.params.get("G.out.w");  // fails early on a checkpoint without generator weights
  return m;
}

namespace {

int pad_up(int n, int multiple) { return ((n + multiple - 1) / multiple) * multiple; }

// Applies the generator over channel stacks with half-overlap core tiling and
// returns per-channel noise estimates input - G(input), rescaled to DN units.
// tile_h/tile_w must be divisible by 2^depth; margins are (tile - stride)/2
// with stride = tile (single tile covering a whole axis) or tile/2.
std::vector<Plane> generator_noise(const std::vector<Plane>& channels, const DenoiseModel& model,
                                   int tile_h, int stride_h, int tile_w, int stride_w) {
  const int height = channels[0].height, width = channels[0].width;
  const int nch = int(channels.size());
  const int margin_h = (tile_h - stride_h) / 2, margin_w = (tile_w - stride_w) / 2;
  const int gh = div_up(height, stride_h), gw = div_up(width, stride_w);
  const float inv_scale = float(1.0 / model.data_scale);
  const float scale = float(model.data_scale);

  std::vector<Plane> noise(size_t(nch), Plane(width, height));
  nn::Tensor<float> input({nch, tile_h, tile_w});
  for (int gy = 0; gy < gh; gy++) {
    for (int gx = 0; gx < gw; gx++) {
      for (int c = 0; c < nch; c++) {
        float* dst = input.data.data() + size_t(c) * tile_h * tile_w;
        for (int i = 0; i < tile_h; i++) {
          const int sy = mirror_index(gy * stride_h - margin_h + i, height);
          for (int j = 0; j < tile_w; j++)
            dst[size_t(i) * tile_w + j] =
                channels[size_t(c)].at(sy, mirror_index(gx * stride_w - margin_w + j, width)) *
                inv_scale;
        }
      }
      nn::Tape<float> tape;
      auto bound = nn::bind_params(tape, model.params, false);
      const int x = tape.leaf(&input, false);
      const int y = nn::generator_forward(tape, model.gen, bound, "G", x);
      const nn::Tensor<float>& out = tape.val(y);
      for (int c = 0; c < nch; c++) {
        const float* in_c = input.data.data() + size_t(c) * tile_h * tile_w;
        const float* out_c = out.data.data() + size_t(c) * tile_h * tile_w;
        for (int i = 0; i < stride_h; i++) {
          const int oy = gy * stride_h + i;
          if (oy >= height) break;
          for (int j = 0; j < stride_w; j++) {
            const int ox = gx * stride_w + j;
            if (ox >= width) break;
            const size_t o = size_t(margin_h + i) * tile_w + (margin_w + j);
            noise[size_t(c)].at(oy, ox) = (in_c[o] - out_c[o]) * scale;
          }
        }
      }
    }
  }
  return noise;
}

// clean = input - noise; the returned noise is recomputed as input - clean so
// the decomposition is exact at every pixel.
std::pair<Plane, Plane> exact_split(const Plane& input, const Plane& noise) {
  Plane clean(input.width, input.height), residual(input.width, input.height);
  for (size_t i = 0; i < input.samples.size(); i++) {
    clean.samples[i] = input.samples[i] - noise.samples[i];
    residual.samples[i] = input.samples[i] - clean.samples[i];
  }
  return {std::move(clean), std::move(residual)};
}

}  // namespace

std::pair<MultiBandRaster, Plane> destripe_scene(const MultiBandRaster& raster,
                                                 const DenoiseModel& model) {
  if (model.mode != NoiseMode::Stripe) fail("config.invalid", "checkpoint was not trained in stripe mode");
  if (raster.bands != 1) fail("io.dimension", "destripe expects a 1-band raster");
  const Plane plane = raster.band_plane(0);

  Plane sub = subband_project(plane, model.pipeline.levels, model.pipeline.selection);
  if (model.pipeline.downsample > 1) sub = downsample_vertical(sub, model.pipeline.downsample);

  const int unit = 1 << model.gen.depth;
  const int tile_h = pad_up(sub.height, unit);  // rows processed whole
  int tile_w, stride_w;
  if (sub.width <= model.patch_width) {
    tile_w = pad_up(sub.width, unit);
    stride_w = tile_w;
  } else {
    tile_w = model.patch_width;  // half-overlap windows, center half kept
    stride_w = tile_w / 2;
  }
  const auto noise_sub =
      generator_noise({sub}, model, tile_h, tile_h, tile_w, stride_w)[0];

  Plane noise = model.pipeline.downsample > 1
                    ? upsample_vertical(noise_sub, model.pipeline.downsample, raster.height)
                    : noise_sub;
  auto [clean, residual] = exact_split(plane, noise);
  clip_plane(clean, raster.lo, raster.hi);

  MultiBandRaster out = raster;
  out.set_band(0, clean);
  return {std::move(out), std::move(residual)};
}

std::pair<MultiBandRaster, Plane> dewave_scene(const MultiBandRaster& raster,
                                               const DenoiseModel& model) {
  if (model.mode != NoiseMode::Wave) fail("config.invalid", "checkpoint was not trained in wave mode");
  if (raster.bands != 4) fail("io.dimension", "dewave expects a 4-band RGBN raster");
  constexpr int kGreen = 1;

  std::vector<Plane> subs;
  subs.reserve(4);
  for (int b = 0; b < 4; b++)
    subs.push_back(subband_project(raster.band_plane(b), model.pipeline.levels,
                                   model.pipeline.selection));

  const TileLayout layout;  // 128/64
  const auto noise_channels =
      generator_noise(subs, model, layout.tile, layout.stride, layout.tile, layout.stride);

  const Plane green = raster.band_plane(kGreen);
  auto [clean_green, residual] = exact_split(green, noise_channels[size_t(kGreen)]);
  clip_plane(clean_green, raster.lo, raster.hi);

  MultiBandRaster out = raster;  // non-green bands pass through bitwise
  out.set_band(kGreen, clean_green);
  return {std::move(out), std::move(residual)};
}

Plane moment_match_destripe(const Plane& p) {
  if (p.height < 2) fail("pipeline.size", "moment matching needs at least 2 rows");
  const int w = p.width, h = p.height;

  double gsum = 0.0, gsum2 = 0.0;
  for (const float v : p.samples) {
    gsum += v;
    gsum2 += double(v) * v;
  }
  const double n = double(p.samples.size());
  const double mu_ref = gsum / n;
  const double sigma_ref = std::sqrt(std::max(0.0, gsum2 / n - mu_ref * mu_ref));

  Plane out(w, h);
  for (int j = 0; j < w; j++) {
    double csum = 0.0, csum2 = 0.0;
    for (int i = 0; i < h; i++) {
      const double v = p.at(i, j);
      csum += v;
      csum2 += v * v;
    }
    const double mu_j = csum / h;
    const double var_j = std::max(0.0, csum2 / h - mu_j * mu_j);
    const double sigma_j = std::sqrt(var_j);
    const double gain = sigma_j > 0.0 ? sigma_ref / sigma_j : 1.0;
    for (int i = 0; i < h; i++) out.at(i, j) = float((p.at(i, j) - mu_j) * gain + mu_ref);
  }
  return out;
}

}  // namespace wavden
