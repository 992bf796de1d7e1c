#pragma once

#include <string>
#include <vector>

#include "wavden/plane.hpp"
#include "wavden/rng.hpp"
#include "wavden/wavelet.hpp"

namespace wavden {

enum class Domain { Clean, Noisy };
enum class NoiseMode { Stripe, Wave };

const char* domain_name(Domain d);
const char* mode_name(NoiseMode m);
NoiseMode parse_mode(const std::string& s);

// One training item: a subband plane (stripe) or a 4-channel subband stack
// (wave), all channels the same size.
struct StoreItem {
  std::vector<Plane> channels;
  std::string provenance;
};

struct DomainStore {
  Domain domain = Domain::Clean;
  NoiseMode mode = NoiseMode::Stripe;
  std::vector<StoreItem> items;

  int channel_count() const { return items.empty() ? 0 : int(items[0].channels.size()); }
};

struct PatchSpec {
  NoiseMode mode = NoiseMode::Stripe;
  int width = 2048;   // stripe default; wave uses 128x128
  int height = 32;
  bool flip_h = true;
  bool flip_v = true;

  static PatchSpec defaults(NoiseMode mode);
};

// Channel-major [C, h, w] buffer ready for the network.
struct Patch {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  float& at(int c, int r, int col) { return data[(size_t(c) * height + r) * width + col]; }
  float at(int c, int r, int col) const { return data[(size_t(c) * height + r) * width + col]; }
};

// Vertical block mean: output row r is the mean of input rows
// [r*factor, (r+1)*factor), accumulated in 64-bit. Width unchanged.
Plane downsample_vertical(const Plane& p, int factor);

// Row replication, then cropped or edge-extended to target_height.
Plane upsample_vertical(const Plane& p, int factor, int target_height);

// The subband construction applied ahead of training/inference.
struct SubbandPipelineConfig {
  int levels = 9;
  SubbandSelection selection;
  int downsample = 32;  // vertical factor (1 = none)

  static SubbandPipelineConfig defaults(NoiseMode mode);
};

// Stripe: per 1-band scene, subband projection then vertical downsampling.
// Wave: per 4-band scene, per-channel subband projection stacked as 4 channels.
DomainStore build_subband_store(const std::vector<MultiBandRaster>& scenes, Domain domain,
                                NoiseMode mode, const SubbandPipelineConfig& cfg);

// Uniform item, uniform top-left offset, independent 50% flips per enabled
// axis. Draw order is pinned: item, row, col, hflip, vflip.
Patch sample_patch(const DomainStore& store, const PatchSpec& spec, Rng& rng);

// Number of non-overlapping patches the store can supply, used as the
// default iterations-per-epoch.
int store_patch_capacity(const DomainStore& store, const PatchSpec& spec);

// Top half / bottom half row split (train on top, test on bottom).
std::pair<MultiBandRaster, MultiBandRaster> split_raster_rows(const MultiBandRaster& r);

struct ManifestEntry {
  Domain domain;
  NoiseMode mode;
  std::string path;  // resolved against the manifest's directory if relative
};

std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries,
                    const std::vector<std::string>& header_comments = {});

std::vector<MultiBandRaster> load_manifest_scenes(const std::string& path, Domain domain,
                                                  NoiseMode mode);

}  // namespace wavden
