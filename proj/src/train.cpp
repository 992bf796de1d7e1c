#include "wavden/train.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wavden {

using ordered_json = nlohmann::ordered_json;

NoiseMode TrainConfig::noise_mode() const { return parse_mode(mode); }

namespace {

// Mode defaults filled in, data_scale resolved against the noisy store.
struct ResolvedConfig {
  TrainConfig cfg;
  PatchSpec patch;
  SubbandPipelineConfig pipeline;
  nn::GeneratorConfig gen;
  nn::DiscriminatorConfig disc;
};

ResolvedConfig resolve(const TrainConfig& in, const DomainStore& noisy) {
  ResolvedConfig r;
  r.cfg = in;
  const NoiseMode mode = in.noise_mode();
  const PatchSpec defaults = PatchSpec::defaults(mode);
  if (r.cfg.patch_width == 0) r.cfg.patch_width = defaults.width;
  if (r.cfg.patch_height == 0) r.cfg.patch_height = defaults.height;
  const SubbandPipelineConfig pipe_defaults = SubbandPipelineConfig::defaults(mode);
  if (r.cfg.levels == 0) r.cfg.levels = pipe_defaults.levels;
  if (r.cfg.downsample == 0) r.cfg.downsample = pipe_defaults.downsample;
  if (r.cfg.selection.empty())
    r.cfg.selection = (mode == NoiseMode::Stripe) ? "HL:1-9" : "LH:1-6";
  if (r.cfg.lambda < 0.0 || r.cfg.gamma < 0.0 || r.cfg.lr0 <= 0.0 || r.cfg.epochs < 1 ||
      r.cfg.batch != 1 || r.cfg.disc_lr_mult <= 0.0)
    fail("config.invalid", "lambda/gamma must be >= 0, lr0 > 0, epochs >= 1, batch == 1");

  if (r.cfg.data_scale == 0.0) {
    double sum = 0.0, sum2 = 0.0;
    size_t n = 0;
    for (const auto& item : noisy.items)
      for (const auto& ch : item.channels)
        for (const float v : ch.samples) {
          sum += v;
          sum2 += double(v) * v;
          n++;
        }
    const double var = n ? std::max(0.0, sum2 / double(n) - (sum / double(n)) * (sum / double(n))) : 0.0;
    const double std = std::sqrt(var);
    r.cfg.data_scale = std > 0.0 ? std : 1.0;
  }

  r.patch.mode = mode;
  r.patch.width = r.cfg.patch_width;
  r.patch.height = r.cfg.patch_height;
  r.patch.flip_h = r.cfg.flip_h;
  r.patch.flip_v = r.cfg.flip_v;

  r.pipeline.levels = r.cfg.levels;
  r.pipeline.selection = SubbandSelection::parse(r.cfg.selection);
  r.pipeline.downsample = r.cfg.downsample;

  const int channels = (mode == NoiseMode::Stripe) ? 1 : 4;
  r.gen.in_channels = channels;
  r.gen.depth = r.cfg.depth;
  r.gen.base_width = r.cfg.base_width;
  r.gen.max_width = r.cfg.max_width;
  r.disc.in_channels = channels;
  r.disc.base_width = r.cfg.disc_base_width;

  if (r.cfg.patch_width % (1 << r.cfg.depth) || r.cfg.patch_height % (1 << r.cfg.depth))
    fail("config.invalid", "patch dims must be divisible by 2^depth");
  return r;
}

nn::Tensor<float> patch_to_tensor(const Patch& p, double scale) {
  nn::Tensor<float> t({p.channels, p.height, p.width});
  const float inv = float(1.0 / scale);
  for (size_t i = 0; i < p.data.size(); i++) t.data[i] = p.data[i] * inv;
  return t;
}

}  // namespace

double l1_mean(const std::vector<float>& a, const std::vector<float>& b) {
  if (a.size() != b.size() || a.empty()) fail("nn.size", "l1_mean: size mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); i++) acc += std::abs(double(a[i]) - double(b[i]));
  return acc / double(a.size());
}

double cycle_loss(const std::vector<float>& y, const std::vector<float>& fgy,
                  const std::vector<float>& x, const std::vector<float>& gfx) {
  return l1_mean(fgy, y) + l1_mean(gfx, x);
}

double identity_loss(const std::vector<float>& x, const std::vector<float>& gx,
                     const std::vector<float>& y, const std::vector<float>& fy) {
  return l1_mean(gx, x) + l1_mean(fy, y);
}

double lr_at(int epoch, const TrainConfig& cfg) {
  if (epoch < 1) fail("config.invalid", "epoch is 1-based");
  const int half = std::max(1, cfg.epochs / 2);
  if (epoch <= half) return cfg.lr0;
  if (epoch > cfg.epochs) return 0.0;
  return cfg.lr0 * double(std::max(cfg.epochs - epoch, 1)) / double(half);
}

std::string loss_csv_header() { return "iteration,gan_g,gan_f,d_x,d_y,cycle,identity,lr"; }

std::string loss_csv_row(const LossRow& r) {
  std::ostringstream ss;
  ss.precision(9);
  ss << r.iteration << ',' << r.gan_g << ',' << r.gan_f << ',' << r.d_x << ',' << r.d_y << ','
     << r.cycle << ',' << r.identity << ',' << r.lr;
  return ss.str();
}

namespace {

const char* kFields[] = {"mode",       "lambda",         "gamma",      "epochs",
                         "lr0",        "disc_lr_mult",   "batch",          "beta1",      "beta2",
                         "eps",        "iters_per_epoch", "seed",       "patch_width",
                         "patch_height", "flip_h",       "flip_v",     "depth",
                         "base_width", "max_width",      "disc_base_width", "data_scale",
                         "levels",     "selection",      "downsample",
                         // checkpoint echo extras, ignored on read
                         "gen_in_channels", "gen_step", "disc_step", "iters_per_epoch_resolved"};

}  // namespace

TrainConfig train_config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail("config.invalid", std::string("config parse: ") + e.what());
  }
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* f : kFields) known = known || key == f;
    if (!known) fail("config.invalid", "unknown config field '" + key + "'");
  }
  TrainConfig c;
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("mode", c.mode);
  get("lambda", c.lambda);
  get("gamma", c.gamma);
  get("epochs", c.epochs);
  get("lr0", c.lr0);
  get("disc_lr_mult", c.disc_lr_mult);
  get("batch", c.batch);
  get("beta1", c.beta1);
  get("beta2", c.beta2);
  get("eps", c.eps);
  get("iters_per_epoch", c.iters_per_epoch);
  get("seed", c.seed);
  get("patch_width", c.patch_width);
  get("patch_height", c.patch_height);
  get("flip_h", c.flip_h);
  get("flip_v", c.flip_v);
  get("depth", c.depth);
  get("base_width", c.base_width);
  get("max_width", c.max_width);
  get("disc_base_width", c.disc_base_width);
  get("data_scale", c.data_scale);
  get("levels", c.levels);
  get("selection", c.selection);
  get("downsample", c.downsample);
  parse_mode(c.mode);
  return c;
}

TrainConfig train_config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io.not_found", "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return train_config_from_json(ss.str());
}

std::string train_config_to_json(const TrainConfig& c) {
  ordered_json j;
  j["mode"] = c.mode;
  j["lambda"] = c.lambda;
  j["gamma"] = c.gamma;
  j["epochs"] = c.epochs;
  j["lr0"] = c.lr0;
  j["disc_lr_mult"] = c.disc_lr_mult;
  j["batch"] = c.batch;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["eps"] = c.eps;
  j["iters_per_epoch"] = c.iters_per_epoch;
  j["seed"] = c.seed;
  j["patch_width"] = c.patch_width;
  j["patch_height"] = c.patch_height;
  j["flip_h"] = c.flip_h;
  j["flip_v"] = c.flip_v;
  j["depth"] = c.depth;
  j["base_width"] = c.base_width;
  j["max_width"] = c.max_width;
  j["disc_base_width"] = c.disc_base_width;
  j["data_scale"] = c.data_scale;
  j["levels"] = c.levels;
  j["selection"] = c.selection;
  j["downsample"] = c.downsample;
  return j.dump(2);
}

Checkpoint train(const TrainConfig& in_cfg, const DomainStore& clean, const DomainStore& noisy,
                 const std::function<void(const LossRow&)>& on_iter) {
  TrainHooks hooks;
  hooks.on_iter = on_iter;
  return train(in_cfg, clean, noisy, hooks);
}

Checkpoint train(const TrainConfig& in_cfg, const DomainStore& clean, const DomainStore& noisy,
                 const TrainHooks& hooks) {
  if (clean.items.empty() || noisy.items.empty()) fail("pipeline.size", "empty domain store");
  ResolvedConfig rc = resolve(in_cfg, noisy);
  const TrainConfig& cfg = rc.cfg;

  Rng base(cfg.seed);
  Rng rng_init = base.split(1);
  Rng rng_clean = base.split(2);
  Rng rng_noisy = base.split(3);

  nn::ParamSet<float> params;
  nn::init_generator(params, rc.gen, "G", rng_init);
  nn::init_generator(params, rc.gen, "F", rng_init);
  nn::init_discriminator(params, rc.disc, "Dx", rng_init);
  nn::init_discriminator(params, rc.disc, "Dy", rng_init);

  std::vector<size_t> gen_group, disc_group;
  for (size_t i = 0; i < params.count(); i++) {
    const std::string& n = params.names[i];
    if (n.rfind("G.", 0) == 0 || n.rfind("F.", 0) == 0)
      gen_group.push_back(i);
    else
      disc_group.push_back(i);
  }

  auto slots = AdamSlots<float>::like(params);
  int64_t gen_step = 0, disc_step = 0;
  const AdamConfig adam{cfg.beta1, cfg.beta2, cfg.eps};

  const int iters_per_epoch = cfg.iters_per_epoch > 0
                                  ? cfg.iters_per_epoch
                                  : store_patch_capacity(noisy, rc.patch);
  const long total = long(cfg.epochs) * iters_per_epoch;

  nn::Tensor<float> zero_like;  // reused for parameters outside the loss graph
  auto apply_group = [&](const std::vector<size_t>& group, nn::Tape<float>& tape,
                         const nn::BoundParams<float>& bound, int64_t step, double lr) {
    for (const size_t idx : group) {
      const int node = bound.node_ids[idx];
      if (tape.has_grad(node)) {
        adam_update_tensor(params.tensors[idx], tape.grad(node), slots.m[idx], slots.v[idx], step,
                           lr, adam);
      } else {
        zero_like = nn::Tensor<float>(params.tensors[idx].shape);
        adam_update_tensor(params.tensors[idx], zero_like, slots.m[idx], slots.v[idx], step, lr,
                           adam);
      }
    }
  };

  for (long it = 0; it < total; it++) {
    const int epoch = int(it / iters_per_epoch) + 1;
    const double lr = lr_at(epoch, cfg);

    const Patch px = sample_patch(clean, rc.patch, rng_clean);
    const Patch py = sample_patch(noisy, rc.patch, rng_noisy);
    nn::Tensor<float> x_t = patch_to_tensor(px, cfg.data_scale);
    nn::Tensor<float> y_t = patch_to_tensor(py, cfg.data_scale);

    LossRow row;
    row.iteration = int(it + 1);
    row.lr = lr;
    nn::Tensor<float> gy_val, fx_val;

    {  // generator phase: G, F minimize fool + lambda*cycle + gamma*identity
      nn::Tape<float> tape;
      auto bound = nn::bind_params(tape, params, true);
      const int x = tape.leaf(&x_t, false);
      const int y = tape.leaf(&y_t, false);
      const int gy = nn::generator_forward(tape, rc.gen, bound, "G", y);
      const int fgy = nn::generator_forward(tape, rc.gen, bound, "F", gy);
      const int fx = nn::generator_forward(tape, rc.gen, bound, "F", x);
      const int gfx = nn::generator_forward(tape, rc.gen, bound, "G", fx);
      const int gx = nn::generator_forward(tape, rc.gen, bound, "G", x);
      const int fy = nn::generator_forward(tape, rc.gen, bound, "F", y);
      const int s_x = nn::discriminator_score_map(tape, rc.disc, bound, "Dx", gy);
      const int s_y = nn::discriminator_score_map(tape, rc.disc, bound, "Dy", fx);
      const int fool_g = tape.lsgan_mse(s_x, 1.0f);
      const int fool_f = tape.lsgan_mse(s_y, 1.0f);
      const int cyc = tape.weighted_sum({tape.l1_mean(fgy, y), tape.l1_mean(gfx, x)}, {1.0f, 1.0f});
      const int ident = tape.weighted_sum({tape.l1_mean(gx, x), tape.l1_mean(fy, y)}, {1.0f, 1.0f});
      const int loss = tape.weighted_sum({fool_g, fool_f, cyc, ident},
                                         {1.0f, 1.0f, float(cfg.lambda), float(cfg.gamma)});
      tape.backward(loss);
      gen_step++;
      apply_group(gen_group, tape, bound, gen_step, lr);

      row.gan_g = tape.scalar(fool_g);
      row.gan_f = tape.scalar(fool_f);
      row.cycle = tape.scalar(cyc);
      row.identity = tape.scalar(ident);
      gy_val = tape.val(gy);
      fx_val = tape.val(fx);
    }

    {  // discriminator phase: detached fakes
      nn::Tape<float> tape;
      auto bound = nn::bind_params(tape, params, true);
      const int x = tape.leaf(&x_t, false);
      const int y = tape.leaf(&y_t, false);
      const int gy_detached = tape.constant(std::move(gy_val));
      const int fx_detached = tape.constant(std::move(fx_val));
      const int d_x = tape.weighted_sum(
          {tape.lsgan_mse(nn::discriminator_score_map(tape, rc.disc, bound, "Dx", x), 1.0f),
           tape.lsgan_mse(nn::discriminator_score_map(tape, rc.disc, bound, "Dx", gy_detached), 0.0f)},
          {0.5f, 0.5f});
      const int d_y = tape.weighted_sum(
          {tape.lsgan_mse(nn::discriminator_score_map(tape, rc.disc, bound, "Dy", y), 1.0f),
           tape.lsgan_mse(nn::discriminator_score_map(tape, rc.disc, bound, "Dy", fx_detached), 0.0f)},
          {0.5f, 0.5f});
      const int loss = tape.weighted_sum({d_x, d_y}, {1.0f, 1.0f});
      tape.backward(loss);
      disc_step++;
      apply_group(disc_group, tape, bound, disc_step, lr * cfg.disc_lr_mult);

      row.d_x = tape.scalar(d_x);
      row.d_y = tape.scalar(d_y);
    }

    for (const double v : {row.gan_g, row.gan_f, row.d_x, row.d_y, row.cycle, row.identity})
      if (!std::isfinite(v))
        fail("train.divergence", "non-finite loss at iteration " + std::to_string(it + 1));

    if (hooks.on_iter) hooks.on_iter(row);

    const auto make_checkpoint = [&]() {
      Checkpoint ckpt;
      ckpt.tensors = params;
      for (size_t i = 0; i < params.count(); i++)
        ckpt.tensors.add("opt.m." + params.names[i], slots.m[i].shape).data = slots.m[i].data;
      for (size_t i = 0; i < params.count(); i++)
        ckpt.tensors.add("opt.v." + params.names[i], slots.v[i].shape).data = slots.v[i].data;
      ordered_json echo = ordered_json::parse(train_config_to_json(cfg));
      echo["gen_in_channels"] = rc.gen.in_channels;
      echo["gen_step"] = gen_step;
      echo["disc_step"] = disc_step;
      echo["iters_per_epoch_resolved"] = iters_per_epoch;
      ckpt.config_text = echo.dump(2);
      return ckpt;
    };
    if (hooks.snapshot_every > 0 && hooks.on_snapshot && (it + 1) % hooks.snapshot_every == 0 &&
        it + 1 != total)
      hooks.on_snapshot(int(it + 1), make_checkpoint());
    if (it + 1 == total) return make_checkpoint();
  }

  fail("config.invalid", "training run with zero iterations");
}

}  // namespace wavden
