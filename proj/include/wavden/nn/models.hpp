#pragma once

#include <string>
#include <unordered_map>

#include "wavden/nn/tape.hpp"
#include "wavden/rng.hpp"

namespace wavden::nn {

// Tight-frame U-Net generator: conv blocks with instance norm, Haar analysis
// in place of pooling (all four subbands retained; the high bands feed the
// decoder's inverse Haar), skip concatenations, and a global residual
// connection from input to output.
struct GeneratorConfig {
  int in_channels = 1;
  int depth = 4;        // pooling levels
  int base_width = 64;  // channels at level 1, doubling per level
  int max_width = 512;
  double norm_eps = 1e-5;

  int width(int level) const { return std::min(base_width << level, max_width); }
};

// PatchGAN: five 4x4 convolutions (strides 2,2,2,1,1; no norm on the first,
// instance norm afterwards; LeakyReLU) and a fully connected layer shared
// across final feature-map locations, one scalar per local patch. Widths are
// base*{1,2,4,8,8}.
struct DiscriminatorConfig {
  int in_channels = 1;
  int base_width = 64;
  double leaky_slope = 0.2;
  double norm_eps = 1e-5;

  static constexpr int kLayers = 5;
  static constexpr int kMinInput = 8;  // three stride-2 halvings must keep >= 1 px

  int width(int layer) const {
    const int mult[kLayers] = {1, 2, 4, 8, 8};
    return base_width * mult[layer];
  }
  int stride(int layer) const { return layer < 3 ? 2 : 1; }
};

// Named parameter tensors in a stable construction order (the checkpoint and
// optimizer-state layouts follow this order).
template <typename T>
struct ParamSet {
  std::vector<std::string> names;
  std::vector<Tensor<T>> tensors;
  std::unordered_map<std::string, size_t> index;

  Tensor<T>& add(const std::string& name, std::vector<int> shape) {
    if (index.count(name)) fail("nn.size", "duplicate parameter " + name);
    index[name] = names.size();
    names.push_back(name);
    tensors.emplace_back(std::move(shape));
    return tensors.back();
  }

  Tensor<T>& get(const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) fail("nn.size", "unknown parameter " + name);
    return tensors[it->second];
  }
  const Tensor<T>& get(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end()) fail("nn.size", "unknown parameter " + name);
    return tensors[it->second];
  }

  size_t count() const { return tensors.size(); }

  template <typename U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (size_t i = 0; i < tensors.size(); i++) out.add(names[i], tensors[i].shape);
    for (size_t i = 0; i < tensors.size(); i++)
      for (size_t j = 0; j < tensors[i].data.size(); j++) out.tensors[i].data[j] = U(tensors[i].data[j]);
    return out;
  }
};

// Parameter leaves bound into a tape, one per tensor of a ParamSet. The tape
// only reads parameter values; gradients accumulate in tape-owned buffers.
template <typename T>
struct BoundParams {
  const ParamSet<T>* set = nullptr;
  std::vector<int> node_ids;

  int node(const std::string& name) const {
    auto it = set->index.find(name);
    if (it == set->index.end()) fail("nn.size", "unknown parameter " + name);
    return node_ids[it->second];
  }
};

template <typename T>
BoundParams<T> bind_params(Tape<T>& tape, const ParamSet<T>& set, bool needs_grad) {
  BoundParams<T> bound;
  bound.set = &set;
  bound.node_ids.reserve(set.count());
  for (size_t i = 0; i < set.count(); i++)
    bound.node_ids.push_back(tape.leaf(&set.tensors[i], needs_grad));
  return bound;
}

namespace detail {

template <typename T>
void init_conv(ParamSet<T>& params, const std::string& stem, int cout, int cin, int kh, int kw,
               Rng& rng) {
  Tensor<T>& w = params.add(stem + ".w", {cout, cin, kh, kw});
  for (auto& v : w.data) v = T(rng.normal(0.0, 0.02));
  params.add(stem + ".b", {cout});  // zeros
}

template <typename T>
void init_norm(ParamSet<T>& params, const std::string& stem, int c) {
  Tensor<T>& g = params.add(stem + ".g", {c});
  std::fill(g.data.begin(), g.data.end(), T(1));
  params.add(stem + ".b", {c});  // zeros
}

}  // namespace detail

// Conv weights ~ N(0, 0.02^2), biases 0, norm scale 1 / shift 0; the draw
// order is fixed by construction order, so a seed pins every weight.
template <typename T>
void init_generator(ParamSet<T>& params, const GeneratorConfig& cfg, const std::string& prefix,
                    Rng& rng) {
  if (cfg.depth < 1 || cfg.base_width < 1) fail("config.invalid", "bad generator config");
  auto block = [&](const std::string& stem, int cin, int cmid, int cout) {
    detail::init_conv(params, stem + ".c0", cmid, cin, 3, 3, rng);
    detail::init_norm(params, stem + ".n0", cmid);
    detail::init_conv(params, stem + ".c1", cout, cmid, 3, 3, rng);
    detail::init_norm(params, stem + ".n1", cout);
  };
  for (int l = 0; l < cfg.depth; l++) {
    const int cin = l == 0 ? cfg.in_channels : cfg.width(l - 1);
    block(prefix + ".enc" + std::to_string(l), cin, cfg.width(l), cfg.width(l));
  }
  block(prefix + ".mid", cfg.width(cfg.depth - 1), cfg.width(cfg.depth), cfg.width(cfg.depth - 1));
  for (int l = cfg.depth - 1; l >= 0; l--) {
    const int cout = l == 0 ? cfg.width(0) : cfg.width(l - 1);
    block(prefix + ".dec" + std::to_string(l), 2 * cfg.width(l), cfg.width(l), cout);
  }
  detail::init_conv(params, prefix + ".out", cfg.in_channels, cfg.width(0), 1, 1, rng);
}

template <typename T>
void init_discriminator(ParamSet<T>& params, const DiscriminatorConfig& cfg,
                        const std::string& prefix, Rng& rng) {
  if (cfg.base_width < 1) fail("config.invalid", "bad discriminator config");
  for (int l = 0; l < DiscriminatorConfig::kLayers; l++) {
    const int cin = l == 0 ? cfg.in_channels : cfg.width(l - 1);
    detail::init_conv(params, prefix + ".conv" + std::to_string(l), cfg.width(l), cin, 4, 4, rng);
    if (l > 0) detail::init_norm(params, prefix + ".norm" + std::to_string(l), cfg.width(l));
  }
  Tensor<T>& w = params.add(prefix + ".fc.w", {cfg.width(DiscriminatorConfig::kLayers - 1)});
  for (auto& v : w.data) v = T(rng.normal(0.0, 0.02));
  params.add(prefix + ".fc.b", {1});
}

// Forward pass; `x` is a [C,H,W] node with H and W divisible by 2^depth.
// Output has the input's shape (global residual skip).
template <typename T>
int generator_forward(Tape<T>& tape, const GeneratorConfig& cfg, const BoundParams<T>& p,
                      const std::string& prefix, int x) {
  const auto& xs = tape.val(x).shape;
  if (int(xs.size()) != 3 || xs[0] != cfg.in_channels)
    fail("nn.size", "generator: expected " + std::to_string(cfg.in_channels) + " channels");
  const int mask = (1 << cfg.depth) - 1;
  if ((xs[1] & mask) || (xs[2] & mask))
    fail("nn.size", "generator: " + std::to_string(xs[2]) + "x" + std::to_string(xs[1]) +
                        " not divisible by 2^" + std::to_string(cfg.depth));

  auto conv_block = [&](const std::string& stem, int h) {
    for (const char* part : {"0", "1"}) {
      h = tape.conv2d(h, p.node(stem + ".c" + part + ".w"), p.node(stem + ".c" + part + ".b"), 1,
                      1, 1, 1, 1);
      h = tape.instance_norm(h, p.node(stem + ".n" + part + ".g"), p.node(stem + ".n" + part + ".b"),
                             cfg.norm_eps);
      h = tape.relu(h);
    }
    return h;
  };

  std::vector<int> skip_feat(size_t(cfg.depth)), skip_high(size_t(cfg.depth));
  int h = x;
  for (int l = 0; l < cfg.depth; l++) {
    h = conv_block(prefix + ".enc" + std::to_string(l), h);
    skip_feat[size_t(l)] = h;
    const int bands = tape.haar_down(h);
    const int w = cfg.width(l);
    h = tape.slice_channels(bands, 0, w);               // LL goes down
    skip_high[size_t(l)] = tape.slice_channels(bands, w, 4 * w);  // LH,HL,HH bypass
  }
  h = conv_block(prefix + ".mid", h);
  for (int l = cfg.depth - 1; l >= 0; l--) {
    h = tape.haar_up(tape.concat_channels(h, skip_high[size_t(l)]));
    h = tape.concat_channels(h, skip_feat[size_t(l)]);
    h = conv_block(prefix + ".dec" + std::to_string(l), h);
  }
  const int body = tape.conv2d(h, p.node(prefix + ".out.w"), p.node(prefix + ".out.b"), 1, 0, 0, 0, 0);
  return tape.add(x, body);
}

// Per-patch scores for one [C,H,W] input: the shared FC head maps every final
// feature-map location (one local image patch each) to a scalar, [P].
template <typename T>
int discriminator_score_map(Tape<T>& tape, const DiscriminatorConfig& cfg,
                            const BoundParams<T>& p, const std::string& prefix, int x) {
  const auto& xs = tape.val(x).shape;
  if (int(xs.size()) != 3 || xs[0] != cfg.in_channels)
    fail("nn.size", "discriminator: expected " + std::to_string(cfg.in_channels) + " channels");
  if (xs[1] < DiscriminatorConfig::kMinInput || xs[2] < DiscriminatorConfig::kMinInput)
    fail("nn.size", "discriminator: input " + std::to_string(xs[2]) + "x" + std::to_string(xs[1]) +
                        " below the receptive footprint");

  int h = x;
  for (int l = 0; l < DiscriminatorConfig::kLayers; l++) {
    const std::string stem = prefix + ".conv" + std::to_string(l);
    const int s = cfg.stride(l);
    // stride 1 keeps size with pads (1,2); stride 2 halves with pads (1,1)
    h = tape.conv2d(h, p.node(stem + ".w"), p.node(stem + ".b"), s, 1, 1, s == 1 ? 2 : 1,
                    s == 1 ? 2 : 1);
    if (l > 0)
      h = tape.instance_norm(h, p.node(prefix + ".norm" + std::to_string(l) + ".g"),
                             p.node(prefix + ".norm" + std::to_string(l) + ".b"), cfg.norm_eps);
    h = tape.leaky_relu(h, T(cfg.leaky_slope));
  }
  return tape.fc_map(h, p.node(prefix + ".fc.w"), p.node(prefix + ".fc.b"));
}

// Scalar score for one [C,H,W] input: the mean of the per-patch scores.
template <typename T>
int discriminator_forward(Tape<T>& tape, const DiscriminatorConfig& cfg, const BoundParams<T>& p,
                          const std::string& prefix, int x) {
  return tape.mean_all(discriminator_score_map(tape, cfg, p, prefix, x));
}

}  // namespace wavden::nn
