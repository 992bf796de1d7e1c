#include <doctest.h>

#include <cmath>
#include <fstream>

#include "test_util.hpp"
#include "wavden/checkpoint.hpp"
#include "wavden/nn/models.hpp"

using namespace wavden;
using nn::BoundParams;
using nn::DiscriminatorConfig;
using nn::GeneratorConfig;
using nn::ParamSet;
using nn::Tape;
using nn::Tensor;

namespace {

template <typename T>
Tensor<T> random_tensor(std::vector<int> shape, uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Tensor<T> t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.data) v = T(rng.uniform(lo, hi));
  return t;
}

void zero_params_with_prefix(ParamSet<float>& params, const std::string& prefix) {
  for (size_t i = 0; i < params.count(); i++)
    if (params.names[i].rfind(prefix, 0) == 0)
      std::fill(params.tensors[i].data.begin(), params.tensors[i].data.end(), 0.0f);
}

}  // namespace

TEST_CASE("haar pooling is lossless") {
  Tape<float> tape;
  const Tensor<float> x = random_tensor<float>({3, 16, 24}, 1);
  const int xin = tape.leaf(&x, false);
  const int back = tape.haar_up(tape.haar_down(xin));
  REQUIRE(tape.val(back).shape == x.shape);
  for (size_t i = 0; i < x.data.size(); i++)
    CHECK(std::abs(tape.val(back).data[i] - x.data[i]) < 1e-5);
}

TEST_CASE("instance norm statistics before affine") {
  Tape<float> tape;
  const Tensor<float> x = random_tensor<float>({4, 12, 12}, 2, -50.0, 90.0);
  Tensor<float> gamma({4}), beta({4});
  std::fill(gamma.data.begin(), gamma.data.end(), 1.0f);
  const int out = tape.instance_norm(tape.leaf(&x, false), tape.leaf(&gamma, false),
                                     tape.leaf(&beta, false), 1e-5);
  const int n = 12 * 12;
  for (int c = 0; c < 4; c++) {
    double mu = 0.0, var = 0.0;
    const float* d = tape.val(out).data.data() + size_t(c) * n;
    for (int i = 0; i < n; i++) mu += d[i];
    mu /= n;
    for (int i = 0; i < n; i++) var += (d[i] - mu) * (d[i] - mu);
    var /= n;
    CHECK(std::abs(mu) < 1e-5);
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("generator with zeroed projection layer is the identity") {
  GeneratorConfig cfg;
  cfg.in_channels = 1;
  cfg.depth = 3;
  cfg.base_width = 8;
  ParamSet<float> params;
  Rng rng(5);
  nn::init_generator(params, cfg, "G", rng);
  zero_params_with_prefix(params, "G.out");

  Tape<float> tape;
  auto bound = nn::bind_params(tape, params, false);
  const Tensor<float> x = random_tensor<float>({1, 16, 32}, 6, -900.0, 900.0);
  const int y = nn::generator_forward(tape, cfg, bound, "G", tape.leaf(&x, false));
  CHECK(tape.val(y).data == x.data);
}

TEST_CASE("generator output shape equals input shape") {
  for (const auto [c, h, w] : {std::tuple{1, 32, 2048}, {4, 128, 128}}) {
    GeneratorConfig cfg;
    cfg.in_channels = c;
    cfg.depth = 4;
    cfg.base_width = 8;
    ParamSet<float> params;
    Rng rng(7);
    nn::init_generator(params, cfg, "G", rng);
    Tape<float> tape;
    auto bound = nn::bind_params(tape, params, false);
    const Tensor<float> x = random_tensor<float>({c, h, w}, 8);
    const int y = nn::generator_forward(tape, cfg, bound, "G", tape.leaf(&x, false));
    CHECK(tape.val(y).shape == std::vector<int>{c, h, w});
  }
}

TEST_CASE("generator rejects non-divisible inputs and stays finite on scaling") {
  GeneratorConfig cfg;
  cfg.in_channels = 1;
  cfg.depth = 4;
  cfg.base_width = 8;
  ParamSet<float> params;
  Rng rng(9);
  nn::init_generator(params, cfg, "G", rng);

  Tape<float> bad;
  auto bound_bad = nn::bind_params(bad, params, false);
  const Tensor<float> x_bad = random_tensor<float>({1, 20, 32}, 10);
  CHECK_THROWS_WITH_AS(nn::generator_forward(bad, cfg, bound_bad, "G", bad.leaf(&x_bad, false)),
                       doctest::Contains("nn.size"), Error);

  for (const float c : {1.0f, 2.0f}) {
    Tape<float> tape;
    auto bound = nn::bind_params(tape, params, false);
    Tensor<float> x({1, 16, 16});
    std::fill(x.data.begin(), x.data.end(), c);
    const int y = nn::generator_forward(tape, cfg, bound, "G", tape.leaf(&x, false));
    for (const float v : tape.val(y).data) CHECK(std::isfinite(v));
  }
}

TEST_CASE("init determinism and declared shapes") {
  GeneratorConfig cfg;
  cfg.in_channels = 1;
  cfg.depth = 4;
  cfg.base_width = 64;
  ParamSet<float> a, b;
  Rng ra(3), rb(3), rc(4);
  nn::init_generator(a, cfg, "G", ra);
  nn::init_generator(b, cfg, "G", rb);
  REQUIRE(a.count() == b.count());
  for (size_t i = 0; i < a.count(); i++) CHECK(a.tensors[i].data == b.tensors[i].data);

  ParamSet<float> c;
  nn::init_generator(c, cfg, "G", rc);
  CHECK(c.get("G.enc0.c0.w").data != a.get("G.enc0.c0.w").data);

  // level widths double from the base and the decoder consumes concatenations
  CHECK(a.get("G.enc1.c0.w").shape == std::vector<int>{128, 64, 3, 3});
  CHECK(a.get("G.enc2.c0.w").shape == std::vector<int>{256, 128, 3, 3});
  CHECK(a.get("G.mid.c0.w").shape == std::vector<int>{512, 512, 3, 3});
  CHECK(a.get("G.dec0.c0.w").shape == std::vector<int>{64, 128, 3, 3});
  CHECK(a.get("G.out.w").shape == std::vector<int>{1, 64, 1, 1});
  for (const float v : a.get("G.enc0.n0.g").data) CHECK(v == 1.0f);
  for (const float v : a.get("G.enc0.c0.b").data) CHECK(v == 0.0f);
}

TEST_CASE("init weight standard deviation matches the 0.02 spec") {
  GeneratorConfig cfg;
  cfg.in_channels = 4;
  cfg.depth = 4;
  cfg.base_width = 64;
  ParamSet<float> params;
  Rng rng(11);
  nn::init_generator(params, cfg, "G", rng);
  double sum = 0.0, sum2 = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < params.count(); i++) {
    if (params.names[i].find(".w") == std::string::npos) continue;
    for (const float v : params.tensors[i].data) {
      sum += v;
      sum2 += double(v) * v;
      n++;
    }
  }
  REQUIRE(n >= 100000);
  const double std = std::sqrt(sum2 / double(n) - (sum / double(n)) * (sum / double(n)));
  CHECK(std >= 0.019);
  CHECK(std <= 0.021);
}

TEST_CASE("discriminator basics") {
  DiscriminatorConfig cfg;
  cfg.in_channels = 1;
  cfg.base_width = 8;

  ParamSet<float> zeroed;
  Rng rz(13);
  nn::init_discriminator(zeroed, cfg, "D", rz);
  for (auto& t : zeroed.tensors) std::fill(t.data.begin(), t.data.end(), 0.0f);
  {
    Tape<float> tape;
    auto bound = nn::bind_params(tape, zeroed, false);
    const Tensor<float> x = random_tensor<float>({1, 16, 64}, 14);
    const int s = nn::discriminator_forward(tape, cfg, bound, "D", tape.leaf(&x, false));
    CHECK(tape.scalar(s) == 0.0f);
  }

  ParamSet<float> params;
  Rng rp(15);
  nn::init_discriminator(params, cfg, "D", rp);
  const Tensor<float> x = random_tensor<float>({1, 16, 64}, 16, -500.0, 500.0);
  auto score = [&](const Tensor<float>& input) {
    Tape<float> tape;
    auto bound = nn::bind_params(tape, params, false);
    return tape.scalar(nn::discriminator_forward(tape, cfg, bound, "D", tape.leaf(&input, false)));
  };
  CHECK(score(x) == score(x));  // deterministic
  CHECK(std::isfinite(score(x)));

  Tensor<float> poked = x;
  poked.data[size_t(8) * 64 + 30] += 1000.0f;  // one interior pixel
  CHECK(score(poked) != score(x));

  Tape<float> tape;
  auto bound = nn::bind_params(tape, params, false);
  const Tensor<float> tiny = random_tensor<float>({1, 4, 4}, 17);
  CHECK_THROWS_WITH_AS(nn::discriminator_forward(tape, cfg, bound, "D", tape.leaf(&tiny, false)),
                       doctest::Contains("nn.size"), Error);
}

TEST_CASE("identity-configured generator bias gradient is the pixel count") {
  GeneratorConfig cfg;
  cfg.in_channels = 1;
  cfg.depth = 2;
  cfg.base_width = 4;
  ParamSet<double> params;
  Rng rng(19);
  nn::init_generator(params, cfg, "G", rng);
  for (auto& v : params.get("G.out.w").data) v = 0.0;
  for (auto& v : params.get("G.out.b").data) v = 0.0;

  Tape<double> tape;
  auto bound = nn::bind_params(tape, params, true);
  const Tensor<double> x = random_tensor<double>({1, 8, 8}, 20);
  const int loss = tape.sum_all(nn::generator_forward(tape, cfg, bound, "G", tape.leaf(&x, false)));
  tape.backward(loss);
  const auto& db = tape.grad(bound.node("G.out.b"));
  CHECK(db.data[0] == doctest::Approx(64.0).epsilon(1e-9));

  // finite-difference cross-check on the bias coordinate
  auto eval = [&](double bump) {
    params.get("G.out.b").data[0] += bump;
    Tape<double> t2;
    auto b2 = nn::bind_params(t2, params, false);
    const double v = t2.scalar(t2.sum_all(nn::generator_forward(t2, cfg, b2, "G", t2.leaf(&x, false))));
    params.get("G.out.b").data[0] -= bump;
    return v;
  };
  const double h = 1e-3;
  CHECK((eval(h) - eval(-h)) / (2 * h) == doctest::Approx(64.0).epsilon(1e-6));
}

TEST_CASE("generator gradients match central finite differences") {
  GeneratorConfig cfg;
  cfg.in_channels = 1;
  cfg.depth = 2;
  cfg.base_width = 4;
  ParamSet<double> params;
  Rng rng(21);
  nn::init_generator(params, cfg, "G", rng);
  const Tensor<double> x = random_tensor<double>({1, 8, 8}, 22);
  const Tensor<double> target = random_tensor<double>({1, 8, 8}, 23);

  auto loss_value = [&]() {
    Tape<double> t;
    auto b = nn::bind_params(t, params, false);
    const int y = nn::generator_forward(t, cfg, b, "G", t.leaf(&x, false));
    return t.scalar(t.l1_mean(y, t.leaf(&target, false)));
  };

  Tape<double> tape;
  auto bound = nn::bind_params(tape, params, true);
  const int y = nn::generator_forward(tape, cfg, bound, "G", tape.leaf(&x, false));
  const int loss = tape.l1_mean(y, tape.leaf(&target, false));
  tape.backward(loss);

  // h = 1e-3 steps cross ReLU kinks for a visible fraction of early-layer
  // coordinates (instance norm centers pre-activations on the kink at init),
  // so failures there are re-verified at h = 1e-5 where the central
  // difference is valid.
  auto numeric_at = [&](size_t i, size_t j, double h) {
    double& slot = params.tensors[i].data[j];
    slot += h;
    const double up = loss_value();
    slot -= 2 * h;
    const double down = loss_value();
    slot += h;
    return (up - down) / (2 * h);
  };
  size_t checked = 0, good_coarse = 0, good_refined = 0, good_fine = 0;
  Rng pick(24);
  for (size_t i = 0; i < params.count(); i++) {
    const auto& g = tape.grad(bound.node_ids[i]);
    for (size_t j = 0; j < params.tensors[i].data.size(); j++) {
      if (pick.uniform() > 0.25) continue;  // sample ~25% of coordinates
      const double analytic = g.data[j];
      auto rel = [&](double numeric) {
        return std::abs(analytic - numeric) /
               std::max(1e-6, std::abs(analytic) + std::abs(numeric));
      };
      checked++;
      const bool coarse_ok = rel(numeric_at(i, j, 1e-3)) <= 1e-3;
      const bool fine_ok = rel(numeric_at(i, j, 1e-5)) <= 1e-3;
      if (coarse_ok) good_coarse++;
      if (coarse_ok || fine_ok) good_refined++;
      if (fine_ok) good_fine++;
    }
  }
  REQUIRE(checked > 500);
  CHECK(double(good_fine) / double(checked) >= 0.99);
  CHECK(double(good_refined) / double(checked) >= 0.99);
  CHECK(double(good_coarse) / double(checked) >= 0.75);  // kink-limited at h=1e-3
}

TEST_CASE("parameters outside the loss graph keep zero gradients") {
  GeneratorConfig cfg;
  cfg.in_channels = 1;
  cfg.depth = 2;
  cfg.base_width = 4;
  ParamSet<float> params;
  Rng rng(25);
  nn::init_generator(params, cfg, "G", rng);
  nn::init_generator(params, cfg, "F", rng);

  Tape<float> tape;
  auto bound = nn::bind_params(tape, params, true);
  const Tensor<float> x = random_tensor<float>({1, 8, 8}, 26);
  const int loss = tape.sum_all(nn::generator_forward(tape, cfg, bound, "G", tape.leaf(&x, false)));
  tape.backward(loss);
  CHECK(!tape.has_grad(bound.node("F.out.w")));
  CHECK(tape.has_grad(bound.node("G.out.w")));
}

TEST_CASE("checkpoint round trip is bit exact") {
  testutil::TempDir tmp("ckpt");
  Checkpoint ckpt;
  Rng rng(27);
  ckpt.tensors.add("G.w", {2, 3});
  ckpt.tensors.add("opt.m.G.w", {6});
  for (auto& v : ckpt.tensors.get("G.w").data) v = float(rng.uniform(-5.0, 5.0));
  for (auto& v : ckpt.tensors.get("opt.m.G.w").data) v = float(rng.normal());
  const auto a_data = ckpt.tensors.get("G.w").data;
  const auto b_data = ckpt.tensors.get("opt.m.G.w").data;
  ckpt.config_text = "{\n  \"mode\": \"stripe\"\n}";

  save_checkpoint(ckpt, tmp.file("m.wckp"));
  const Checkpoint back = load_checkpoint(tmp.file("m.wckp"));
  REQUIRE(back.tensors.count() == 2);
  CHECK(back.tensors.names == ckpt.tensors.names);
  CHECK(back.tensors.get("G.w").shape == std::vector<int>{2, 3});
  CHECK(back.tensors.get("G.w").data == a_data);
  CHECK(back.tensors.get("opt.m.G.w").data == b_data);
  CHECK(back.config_text == ckpt.config_text);

  save_checkpoint(back, tmp.file("m2.wckp"));
  std::ifstream f1(tmp.file("m.wckp"), std::ios::binary);
  std::ifstream f2(tmp.file("m2.wckp"), std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);

  CHECK_THROWS_WITH_AS(load_checkpoint(tmp.file("missing.wckp")),
                       doctest::Contains("io.not_found"), Error);
}
