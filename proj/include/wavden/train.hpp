#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wavden/checkpoint.hpp"
#include "wavden/data_pipeline.hpp"
#include "wavden/nn/models.hpp"

namespace wavden {

// Hyperparameters and model geometry for one training run. Values mirror the
// flat JSON config file field-for-field; zeros mean "mode default" where
// noted.
struct TrainConfig {
  std::string mode = "stripe";  // stripe | wave
  double lambda = 10.0;         // cycle-consistency weight
  double gamma = 5.0;           // identity weight
  int epochs = 200;
  double lr0 = 2e-3;
  double disc_lr_mult = 1.0;  // discriminator lr = lr0 * disc_lr_mult
  int batch = 1;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
  int iters_per_epoch = 0;  // 0 = noisy-store patch capacity
  uint64_t seed = 0;
  int patch_width = 0;   // 0 = mode default (stripe 2048, wave 128)
  int patch_height = 0;  // 0 = mode default (stripe 32, wave 128)
  bool flip_h = true;
  bool flip_v = true;
  int depth = 4;
  int base_width = 64;
  int max_width = 512;
  int disc_base_width = 64;
  double data_scale = 0.0;  // DN units mapped to 1.0; 0 = std of the noisy store
  int levels = 0;           // 0 = mode default (stripe 9, wave 6)
  std::string selection;    // "" = mode default ("HL:1-9" / "LH:1-6")
  int downsample = 0;       // 0 = mode default (stripe 32, wave 1)

  NoiseMode noise_mode() const;
};

TrainConfig train_config_from_json(const std::string& text);
TrainConfig train_config_from_file(const std::string& path);
std::string train_config_to_json(const TrainConfig& cfg);

// --- closed-form loss pieces (Eqs. of the LSGAN cycle objective) -----------

inline double lsgan_g_loss(double score_fake) {
  const double d = score_fake - 1.0;
  return d * d;
}

inline double lsgan_d_loss(double score_real, double score_fake) {
  const double r = score_real - 1.0;
  return 0.5 * r * r + 0.5 * score_fake * score_fake;
}

double l1_mean(const std::vector<float>& a, const std::vector<float>& b);

// mean|FGy - y| + mean|GFx - x|
double cycle_loss(const std::vector<float>& y, const std::vector<float>& fgy,
                  const std::vector<float>& x, const std::vector<float>& gfx);

// mean|Gx - x| + mean|Fy - y|
double identity_loss(const std::vector<float>& x, const std::vector<float>& gx,
                     const std::vector<float>& y, const std::vector<float>& fy);

struct LossParts {
  double gan_g = 0.0;
  double gan_f = 0.0;
  double cycle = 0.0;
  double identity = 0.0;
};

inline double total_objective(const LossParts& parts, double lambda, double gamma) {
  return parts.gan_g + parts.gan_f + lambda * parts.cycle + gamma * parts.identity;
}

// Constant lr0 through the first half of training, then a per-epoch linear
// ramp to zero over the second half; the final epoch keeps the last nonzero
// step, epochs beyond the schedule get 0.
double lr_at(int epoch, const TrainConfig& cfg);

// --- Adam -------------------------------------------------------------------

struct AdamConfig {
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamSlots {
  std::vector<nn::Tensor<T>> m, v;

  static AdamSlots like(const nn::ParamSet<T>& params) {
    AdamSlots s;
    for (const auto& t : params.tensors) {
      s.m.emplace_back(t.shape);
      s.v.emplace_back(t.shape);
    }
    return s;
  }
};

// Standard bias-corrected update for one tensor. `step` is 1-based. A NaN or
// Inf gradient aborts. lr == 0 leaves the parameter bytes untouched (moments
// still advance).
template <typename T>
void adam_update_tensor(nn::Tensor<T>& param, const nn::Tensor<T>& grad, nn::Tensor<T>& m,
                        nn::Tensor<T>& v, int64_t step, double lr, const AdamConfig& cfg) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(step));
  for (size_t i = 0; i < param.data.size(); i++) {
    const double g = double(grad.data[i]);
    if (!std::isfinite(g)) fail("nn.gradient", "non-finite gradient in Adam update");
    const double mi = cfg.beta1 * double(m.data[i]) + (1.0 - cfg.beta1) * g;
    const double vi = cfg.beta2 * double(v.data[i]) + (1.0 - cfg.beta2) * g * g;
    m.data[i] = T(mi);
    v.data[i] = T(vi);
    if (lr != 0.0)
      param.data[i] = T(double(param.data[i]) - lr * (mi / bc1) / (std::sqrt(vi / bc2) + cfg.eps));
  }
}

// --- training ----------------------------------------------------------------

struct LossRow {
  int iteration = 0;
  double gan_g = 0.0, gan_f = 0.0;
  double d_x = 0.0, d_y = 0.0;
  double cycle = 0.0, identity = 0.0;
  double lr = 0.0;
};

std::string loss_csv_header();
std::string loss_csv_row(const LossRow& row);

// Observers for a training run: per-iteration loss rows and optional periodic
// checkpoint snapshots (snapshot_every == 0 disables them).
struct TrainHooks {
  std::function<void(const LossRow&)> on_iter;
  int snapshot_every = 0;
  std::function<void(int iteration, const Checkpoint&)> on_snapshot;
};

// Alternating optimization (generators first, then discriminators with
// detached fakes), batch 1, serial and fully deterministic for a fixed seed.
Checkpoint train(const TrainConfig& cfg, const DomainStore& clean, const DomainStore& noisy,
                 const TrainHooks& hooks);
Checkpoint train(const TrainConfig& cfg, const DomainStore& clean, const DomainStore& noisy,
                 const std::function<void(const LossRow&)>& on_iter = nullptr);

}  // namespace wavden
