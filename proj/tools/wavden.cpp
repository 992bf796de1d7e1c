#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wavden/inference.hpp"
#include "wavden/metrics.hpp"
#include "wavden/nn/gemm.hpp"
#include "wavden/noise_synth.hpp"
#include "wavden/raster_io.hpp"
#include "wavden/train.hpp"

namespace {

using namespace wavden;

int exit_code_for(const std::string& category) {
  if (category.rfind("train.divergence", 0) == 0 || category.rfind("nn.gradient", 0) == 0)
    return 3;
  for (const char* user : {"io.", "config.", "cli.", "pipeline.", "tile.", "wavelet.", "nn.size"})
    if (category.rfind(user, 0) == 0) return 2;
  return 1;
}

struct GlobalOpts {
  uint64_t seed = 0;
  int threads = 1;
  bool verbose = false;
};

std::string format_path(const std::string& dir, const char* stem, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.wcr", stem, index);
  return (std::filesystem::path(dir) / buf).string();
}

std::vector<double> parse_period_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stod(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (out.empty()) fail("config.invalid", "empty period list");
  return out;
}

// ---------------------------------------------------------------------------

struct SynthOpts {
  std::string mode = "stripe";
  std::string out_dir;
  int train_count = 16;
  int test_count = 8;
  int width = 512;
  int height = 512;
  double sigma = 1310.0;
  int corr_len = 3;
  double drift = 0.0;
  double amplitude = 700.0;
  std::string periods = "6,11,23";
  double phase_jitter = 0.03;
};

int run_synth(const GlobalOpts& g, const SynthOpts& o) {
  const NoiseMode mode = parse_mode(o.mode);
  std::filesystem::create_directories(o.out_dir);
  const int bands = mode == NoiseMode::Stripe ? 1 : 4;
  constexpr int kGreen = 1;

  auto make_clean = [&](uint64_t seed) {
    MultiBandRaster r(o.width, o.height, bands);
    for (int b = 0; b < bands; b++)
      r.set_band(b, gen_texture(o.width, o.height, seed * 8 + uint64_t(b)));
    return r;
  };
  auto make_noise = [&](uint64_t seed) {
    if (mode == NoiseMode::Stripe)
      return gen_stripe_noise(o.width, o.height, {o.sigma, o.corr_len, o.drift, seed});
    WaveNoiseParams p;
    p.amplitude = o.amplitude;
    p.periods = parse_period_list(o.periods);
    p.phase_jitter = o.phase_jitter;
    p.seed = seed;
    return gen_wave_noise(o.width, o.height, p);
  };
  const int noise_band = mode == NoiseMode::Stripe ? 0 : kGreen;

  std::vector<ManifestEntry> clean_entries, noisy_entries, test_entries;
  for (int i = 0; i < o.train_count; i++) {
    const MultiBandRaster clean = make_clean(g.seed * 1000003 + 1000 + uint64_t(i));
    const auto [noisy, truth] =
        make_synthetic_pair(clean, make_noise(g.seed * 1000003 + 3000 + uint64_t(i)), noise_band);
    const std::string cp = format_path(o.out_dir, "clean", i);
    const std::string np = format_path(o.out_dir, "noisy", i);
    write_raster_atomic(truth, cp, RasterFormat::WCR);
    write_raster_atomic(noisy, np, RasterFormat::WCR);
    clean_entries.push_back({Domain::Clean, mode, cp});
    noisy_entries.push_back({Domain::Noisy, mode, np});
  }
  for (int i = 0; i < o.test_count; i++) {
    const MultiBandRaster clean = make_clean(g.seed * 1000003 + 4000 + uint64_t(i));
    const auto [noisy, truth] =
        make_synthetic_pair(clean, make_noise(g.seed * 1000003 + 5000 + uint64_t(i)), noise_band);
    const std::string cp = format_path(o.out_dir, "test_clean", i);
    const std::string np = format_path(o.out_dir, "test_noisy", i);
    write_raster_atomic(truth, cp, RasterFormat::WCR);
    write_raster_atomic(noisy, np, RasterFormat::WCR);
    test_entries.push_back({Domain::Clean, mode, cp});
    test_entries.push_back({Domain::Noisy, mode, np});
  }

  std::vector<std::string> header = {
      "mode=" + o.mode,
      "seed=" + std::to_string(g.seed),
      "tiles=" + std::to_string(o.width) + "x" + std::to_string(o.height),
      mode == NoiseMode::Stripe
          ? "sigma=" + std::to_string(o.sigma) + " corr_len=" + std::to_string(o.corr_len) +
                " drift=" + std::to_string(o.drift)
          : "amplitude=" + std::to_string(o.amplitude) + " periods=" + o.periods +
                " phase_jitter=" + std::to_string(o.phase_jitter)};
  write_manifest((std::filesystem::path(o.out_dir) / "clean.manifest").string(), clean_entries,
                 header);
  write_manifest((std::filesystem::path(o.out_dir) / "noisy.manifest").string(), noisy_entries,
                 header);
  write_manifest((std::filesystem::path(o.out_dir) / "test.manifest").string(), test_entries,
                 header);
  if (g.verbose)
    std::cerr << "synth: " << o.train_count << " train + " << o.test_count << " test tiles in "
              << o.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainOpts {
  std::string config_path;
  std::string clean_manifest;
  std::string noisy_manifest;
  std::string out_path;
  std::string loss_csv;
  int progress_every = 0;
};

int run_train(const GlobalOpts& g, const TrainOpts& o) {
  TrainConfig cfg = o.config_path.empty() ? TrainConfig{} : train_config_from_file(o.config_path);
  if (g.seed != 0) cfg.seed = g.seed;
  const NoiseMode mode = cfg.noise_mode();

  SubbandPipelineConfig pipeline = SubbandPipelineConfig::defaults(mode);
  if (cfg.levels != 0) pipeline.levels = cfg.levels;
  if (cfg.downsample != 0) pipeline.downsample = cfg.downsample;
  if (!cfg.selection.empty()) pipeline.selection = SubbandSelection::parse(cfg.selection);

  const auto clean_scenes = load_manifest_scenes(o.clean_manifest, Domain::Clean, mode);
  const auto noisy_scenes = load_manifest_scenes(o.noisy_manifest, Domain::Noisy, mode);
  const DomainStore clean = build_subband_store(clean_scenes, Domain::Clean, mode, pipeline);
  const DomainStore noisy = build_subband_store(noisy_scenes, Domain::Noisy, mode, pipeline);

  std::ofstream csv;
  if (!o.loss_csv.empty()) {
    csv.open(o.loss_csv + ".tmp", std::ios::trunc);
    if (!csv) fail("io.not_found", "cannot create " + o.loss_csv);
    csv << loss_csv_header() << "\n";
  }
  const Checkpoint ckpt = train(cfg, clean, noisy, [&](const LossRow& row) {
    if (csv.is_open()) csv << loss_csv_row(row) << "\n";
    if (o.progress_every > 0 && row.iteration % o.progress_every == 0)
      std::cerr << "iter " << row.iteration << " gan_g=" << row.gan_g << " d_x=" << row.d_x
                << " cycle=" << row.cycle << " identity=" << row.identity << " lr=" << row.lr
                << "\n";
  });
  if (csv.is_open()) {
    csv.close();
    std::filesystem::rename(o.loss_csv + ".tmp", o.loss_csv);
  }
  save_checkpoint(ckpt, o.out_path);
  if (g.verbose) std::cerr << "train: wrote " << o.out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct DenoiseOpts {
  std::string mode = "stripe";
  std::string ckpt_path;
  std::string in_path;
  std::string out_path;
  std::string noise_out;
};

int run_denoise(const GlobalOpts& g, const DenoiseOpts& o) {
  const DenoiseModel model = model_from_checkpoint(load_checkpoint(o.ckpt_path));
  if (parse_mode(o.mode) != model.mode)
    fail("config.invalid", "checkpoint mode does not match --mode " + o.mode);
  const MultiBandRaster input = read_raster(o.in_path);
  const auto [clean, noise] = model.mode == NoiseMode::Stripe ? destripe_scene(input, model)
                                                              : dewave_scene(input, model);
  write_raster_atomic(clean, o.out_path, RasterFormat::WCR);
  if (!o.noise_out.empty()) write_plane(noise, o.noise_out);
  if (g.verbose) std::cerr << "denoise: wrote " << o.out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalOpts {
  std::string truth_path;
  std::string test_path;
  double peak = 65535.0;
  int band = -1;  // -1 = all bands
};

int run_eval(const EvalOpts& o) {
  const MultiBandRaster truth = read_raster(o.truth_path);
  const MultiBandRaster test = read_raster(o.test_path);
  if (truth.width != test.width || truth.height != test.height || truth.bands != test.bands)
    fail("io.dimension", "eval: rasters differ in size");
  if (o.band >= truth.bands) fail("io.dimension", "eval: band out of range");

  const int from = o.band < 0 ? 0 : o.band;
  const int to = o.band < 0 ? truth.bands : o.band + 1;
  double inv_psnr_mse = 0.0, ssim_sum = 0.0;
  for (int b = from; b < to; b++) {
    const Plane a = truth.band_plane(b);
    const Plane t = test.band_plane(b);
    double mse = 0.0;
    for (size_t i = 0; i < a.samples.size(); i++) {
      const double d = double(a.samples[i]) - double(t.samples[i]);
      mse += d * d;
    }
    inv_psnr_mse += mse / double(a.samples.size());
    SsimConfig scfg;
    scfg.dynamic_range = o.peak;
    ssim_sum += ssim(a, t, scfg);
  }
  const int nb = to - from;
  const double mse = inv_psnr_mse / nb;
  const double p = mse == 0.0 ? std::numeric_limits<double>::infinity()
                              : 10.0 * std::log10(o.peak * o.peak / mse);
  const double s = ssim_sum / nb;

  char line[128];
  std::snprintf(line, sizeof(line), "PSNR %g SSIM %.6f", p, s);
  std::cout << line << "\n";
  std::cout << "csv," << o.truth_path << "," << o.test_path << "," << p << "," << s << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct WaveletOpts {
  std::string in_path;
  std::string out_path;
  int levels = 9;
  std::string select = "HL:1-9";
};

int run_wavelet(const WaveletOpts& o) {
  const Plane input = read_plane(o.in_path);
  const SubbandSelection sel = SubbandSelection::parse(o.select);
  write_plane(subband_project(input, o.levels, sel), o.out_path);
  return 0;
}

int run_baseline_destripe(const std::string& in_path, const std::string& out_path) {
  MultiBandRaster raster = read_raster(in_path);
  if (raster.bands != 1) fail("io.dimension", "baseline-destripe expects a 1-band raster");
  Plane fixed = moment_match_destripe(raster.band_plane(0));
  clip_plane(fixed, raster.lo, raster.hi);
  raster.set_band(0, fixed);
  write_raster_atomic(raster, out_path, RasterFormat::WCR);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavden: wavelet-subband unpaired denoising for multi-band rasters"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Seed for all stochastic outputs");
  app.add_option("--threads", g.threads, "Internal parallelism (BLAS threads)");
  app.add_flag("--verbose", g.verbose, "Log progress to stderr");

  SynthOpts synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate paired clean/noisy tiles + manifests");
  synth_cmd->add_option("--mode", synth.mode, "stripe|wave");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--train-count", synth.train_count, "Training tiles");
  synth_cmd->add_option("--test-count", synth.test_count, "Held-out tiles");
  synth_cmd->add_option("--width", synth.width, "Tile width");
  synth_cmd->add_option("--height", synth.height, "Tile height");
  synth_cmd->add_option("--sigma", synth.sigma, "Stripe amplitude (DN)");
  synth_cmd->add_option("--corr-len", synth.corr_len, "Stripe column correlation length");
  synth_cmd->add_option("--drift", synth.drift, "Stripe vertical modulation in [0,1]");
  synth_cmd->add_option("--amplitude", synth.amplitude, "Wave amplitude (DN)");
  synth_cmd->add_option("--periods", synth.periods, "Wave vertical periods, comma separated");
  synth_cmd->add_option("--phase-jitter", synth.phase_jitter, "Wave phase walk std (rad/col)");

  TrainOpts train_o;
  auto* train_cmd = app.add_subcommand("train", "Train the subband translation model");
  train_cmd->add_option("--config", train_o.config_path, "Flat JSON training config");
  train_cmd->add_option("--clean-manifest", train_o.clean_manifest, "Clean-domain manifest")
      ->required();
  train_cmd->add_option("--noisy-manifest", train_o.noisy_manifest, "Noisy-domain manifest")
      ->required();
  train_cmd->add_option("--out", train_o.out_path, "Checkpoint output path")->required();
  train_cmd->add_option("--loss-csv", train_o.loss_csv, "Per-iteration loss CSV");
  train_cmd->add_option("--progress-every", train_o.progress_every, "Log every N iterations");

  DenoiseOpts den;
  auto* den_cmd = app.add_subcommand("denoise", "Reconstruct a scene with a trained model");
  den_cmd->add_option("--mode", den.mode, "stripe|wave")->required();
  den_cmd->add_option("--ckpt", den.ckpt_path, "Checkpoint path")->required();
  den_cmd->add_option("--in", den.in_path, "Input raster")->required();
  den_cmd->add_option("--out", den.out_path, "Denoised output")->required();
  den_cmd->add_option("--noise-out", den.noise_out, "Estimated noise plane output");

  EvalOpts ev;
  auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM of a test raster against ground truth");
  eval_cmd->add_option("--truth", ev.truth_path, "Ground truth raster")->required();
  eval_cmd->add_option("--test", ev.test_path, "Raster under test")->required();
  eval_cmd->add_option("--peak", ev.peak, "Dynamic range for PSNR/SSIM");
  eval_cmd->add_option("--band", ev.band, "Band index (-1 = all)");

  WaveletOpts wav;
  auto* wav_cmd = app.add_subcommand("wavelet", "Project a plane onto selected subbands");
  wav_cmd->add_option("--in", wav.in_path, "Input plane (1-band raster)")->required();
  wav_cmd->add_option("--out", wav.out_path, "Output plane")->required();
  wav_cmd->add_option("--levels", wav.levels, "Decomposition levels");
  wav_cmd->add_option("--select", wav.select, "Selection, e.g. HL:1-9 or LH:1-6,LL:6");

  std::string base_in, base_out;
  auto* base_cmd = app.add_subcommand("baseline-destripe", "Column moment-matching baseline");
  base_cmd->add_option("--in", base_in, "Input raster")->required();
  base_cmd->add_option("--out", base_out, "Output raster")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: cli.usage: " << e.what() << "\n";
    return 2;
  }

  try {
    wavden::nn::set_blas_threads(std::max(1, g.threads));
    if (synth_cmd->parsed()) return run_synth(g, synth);
    if (train_cmd->parsed()) return run_train(g, train_o);
    if (den_cmd->parsed()) return run_denoise(g, den);
    if (eval_cmd->parsed()) return run_eval(ev);
    if (wav_cmd->parsed()) return run_wavelet(wav);
    if (base_cmd->parsed()) return run_baseline_destripe(base_in, base_out);
  } catch (const wavden::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
