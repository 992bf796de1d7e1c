#include "wavden/data_pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wavden/raster_io.hpp"

namespace wavden {

const char* domain_name(Domain d) { return d == Domain::Clean ? "clean" : "noisy"; }
const char* mode_name(NoiseMode m) { return m == NoiseMode::Stripe ? "stripe" : "wave"; }

NoiseMode parse_mode(const std::string& s) {
  if (s == "stripe") return NoiseMode::Stripe;
  if (s == "wave") return NoiseMode::Wave;
  fail("config.invalid", "unknown mode '" + s + "' (expected stripe|wave)");
}

PatchSpec PatchSpec::defaults(NoiseMode mode) {
  PatchSpec spec;
  spec.mode = mode;
  if (mode == NoiseMode::Wave) {
    spec.width = 128;
    spec.height = 128;
  }
  return spec;
}

SubbandPipelineConfig SubbandPipelineConfig::defaults(NoiseMode mode) {
  SubbandPipelineConfig cfg;
  if (mode == NoiseMode::Stripe) {
    cfg.levels = 9;
    cfg.selection = SubbandSelection::range(Subband::HL, 1, 9);
    cfg.downsample = 32;
  } else {
    cfg.levels = 6;
    cfg.selection = SubbandSelection::range(Subband::LH, 1, 6);
    cfg.downsample = 1;
  }
  return cfg;
}

Plane downsample_vertical(const Plane& p, int factor) {
  if (factor < 1) fail("config.invalid", "downsample factor must be >= 1");
  if (p.height < factor)
    fail("pipeline.size", "plane height " + std::to_string(p.height) +
                              " smaller than downsample factor " + std::to_string(factor));
  const int out_h = p.height / factor;
  Plane out(p.width, out_h);
  for (int r = 0; r < out_h; r++) {
    for (int c = 0; c < p.width; c++) {
      double acc = 0.0;
      for (int k = 0; k < factor; k++) acc += p.at(r * factor + k, c);
      out.at(r, c) = float(acc / double(factor));
    }
  }
  return out;
}

Plane upsample_vertical(const Plane& p, int factor, int target_height) {
  if (factor < 1) fail("config.invalid", "upsample factor must be >= 1");
  if (target_height < 1 || target_height > p.height * factor + factor)
    fail("pipeline.size", "target height " + std::to_string(target_height) +
                              " out of range for " + std::to_string(p.height) + "x" +
                              std::to_string(factor));
  Plane out(p.width, target_height);
  for (int r = 0; r < target_height; r++) {
    const int src = std::min(r / factor, p.height - 1);
    for (int c = 0; c < p.width; c++) out.at(r, c) = p.at(src, c);
  }
  return out;
}

DomainStore build_subband_store(const std::vector<MultiBandRaster>& scenes, Domain domain,
                                NoiseMode mode, const SubbandPipelineConfig& cfg) {
  if (scenes.empty()) fail("pipeline.size", "no scenes for store");
  cfg.selection.validate(cfg.levels);
  DomainStore store;
  store.domain = domain;
  store.mode = mode;
  const int want_bands = (mode == NoiseMode::Stripe) ? 1 : 4;
  int idx = 0;
  for (const auto& scene : scenes) {
    if (scene.bands != want_bands)
      fail("pipeline.size", "scene " + std::to_string(idx) + " has " + std::to_string(scene.bands) +
                                " bands, " + mode_name(mode) + " mode needs " +
                                std::to_string(want_bands));
    StoreItem item;
    item.provenance = "scene" + std::to_string(idx);
    for (int b = 0; b < want_bands; b++) {
      Plane sub = subband_project(scene.band_plane(b), cfg.levels, cfg.selection);
      if (cfg.downsample > 1) sub = downsample_vertical(sub, cfg.downsample);
      item.channels.push_back(std::move(sub));
    }
    store.items.push_back(std::move(item));
    idx++;
  }
  return store;
}

namespace {

void flip_patch_h(Patch& p) {
  for (int c = 0; c < p.channels; c++)
    for (int r = 0; r < p.height; r++)
      for (int a = 0, b = p.width - 1; a < b; a++, b--) std::swap(p.at(c, r, a), p.at(c, r, b));
}

void flip_patch_v(Patch& p) {
  for (int c = 0; c < p.channels; c++)
    for (int a = 0, b = p.height - 1; a < b; a++, b--)
      for (int col = 0; col < p.width; col++) std::swap(p.at(c, a, col), p.at(c, b, col));
}

}  // namespace

Patch sample_patch(const DomainStore& store, const PatchSpec& spec, Rng& rng) {
  if (store.items.empty()) fail("pipeline.size", "empty store");
  const size_t item_idx = rng.below(store.items.size());
  const StoreItem& item = store.items[item_idx];
  const Plane& first = item.channels[0];
  if (spec.width > first.width || spec.height > first.height)
    fail("pipeline.size", "patch " + std::to_string(spec.width) + "x" + std::to_string(spec.height) +
                              " larger than item " + std::to_string(first.width) + "x" +
                              std::to_string(first.height));
  const int row = int(rng.below(uint64_t(first.height - spec.height + 1)));
  const int col = int(rng.below(uint64_t(first.width - spec.width + 1)));
  const bool fh = spec.flip_h && rng.coin();
  const bool fv = spec.flip_v && rng.coin();

  Patch patch;
  patch.channels = int(item.channels.size());
  patch.height = spec.height;
  patch.width = spec.width;
  patch.data.resize(size_t(patch.channels) * spec.height * spec.width);
  for (int c = 0; c < patch.channels; c++)
    for (int r = 0; r < spec.height; r++)
      for (int x = 0; x < spec.width; x++) patch.at(c, r, x) = item.channels[size_t(c)].at(row + r, col + x);
  if (fh) flip_patch_h(patch);
  if (fv) flip_patch_v(patch);
  return patch;
}

int store_patch_capacity(const DomainStore& store, const PatchSpec& spec) {
  long total = 0;
  for (const auto& item : store.items) {
    const long area = long(item.channels[0].width) * item.channels[0].height;
    total += std::max(1L, area / (long(spec.width) * spec.height));
  }
  return int(std::min(total, long(1 << 30)));
}

std::pair<MultiBandRaster, MultiBandRaster> split_raster_rows(const MultiBandRaster& r) {
  if (r.height < 2) fail("pipeline.size", "cannot split a raster with fewer than 2 rows");
  const int top_h = r.height / 2;
  MultiBandRaster top(r.width, top_h, r.bands);
  MultiBandRaster bottom(r.width, r.height - top_h, r.bands);
  top.lo = bottom.lo = r.lo;
  top.hi = bottom.hi = r.hi;
  for (int b = 0; b < r.bands; b++) {
    const float* src = r.band(b);
    std::copy(src, src + size_t(top_h) * r.width, top.band(b));
    std::copy(src + size_t(top_h) * r.width, src + size_t(r.height) * r.width, bottom.band(b));
  }
  return {top, bottom};
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io.not_found", "cannot open manifest " + path);
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string domain, mode, file;
    if (!(ss >> domain >> mode >> file))
      fail("io.format", path + ":" + std::to_string(lineno) + ": expected '<domain> <mode> <path>'");
    ManifestEntry e;
    if (domain == "clean")
      e.domain = Domain::Clean;
    else if (domain == "noisy")
      e.domain = Domain::Noisy;
    else
      fail("io.format", path + ":" + std::to_string(lineno) + ": unknown domain '" + domain + "'");
    e.mode = parse_mode(mode);
    std::filesystem::path fp(file);
    e.path = fp.is_absolute() ? fp.string() : (base / fp).string();
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries,
                    const std::vector<std::string>& header_comments) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail("io.not_found", "cannot create manifest " + path);
  for (const auto& c : header_comments) out << "# " << c << "\n";
  for (const auto& e : entries)
    out << domain_name(e.domain) << " " << mode_name(e.mode) << " " << e.path << "\n";
}

std::vector<MultiBandRaster> load_manifest_scenes(const std::string& path, Domain domain,
                                                  NoiseMode mode) {
  std::vector<MultiBandRaster> scenes;
  for (const auto& e : read_manifest(path)) {
    if (e.domain != domain || e.mode != mode) continue;
    scenes.push_back(read_raster(e.path));
  }
  if (scenes.empty())
    fail("io.format", path + ": no entries for " + std::string(domain_name(domain)) + "/" +
                          mode_name(mode));
  return scenes;
}

}  // namespace wavden
