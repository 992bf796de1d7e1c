#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>

#include "wavden/nn/gemm.hpp"
#include "wavden/nn/tensor.hpp"

namespace wavden::nn {

// Define-by-run reverse-mode autodiff over Tensor<T>. A fresh graph is built
// per training step; backward() walks the nodes in reverse creation order.
// Parameter leaves reference external tensors so rebuilding a graph does not
// copy weights.
template <typename T>
class Tape {
public:
  // --- graph construction -------------------------------------------------

  int leaf(const Tensor<T>* external, bool needs_grad) {
    Node n;
    n.external = external;
    n.needs_grad = needs_grad;
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
  }

  int constant(Tensor<T> value) {
    Node n;
    n.storage = std::move(value);
    n.needs_grad = false;
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
  }

  const Tensor<T>& val(int id) const {
    const Node& n = nodes_[size_t(id)];
    return n.external ? *n.external : n.storage;
  }
  T scalar(int id) const { return val(id).data[0]; }
  bool needs_grad(int id) const { return nodes_[size_t(id)].needs_grad; }

  // Gradient buffer for a node, allocated zero on first touch.
  Tensor<T>& grad(int id) {
    Node& n = nodes_[size_t(id)];
    if (n.grad.shape.empty()) n.grad = Tensor<T>(val(id).shape);
    return n.grad;
  }
  bool has_grad(int id) const { return !nodes_[size_t(id)].grad.empty(); }

  void backward(int root) {
    if (val(root).size() != 1) fail("nn.gradient", "backward root must be a scalar");
    grad(root).data[0] = T(1);
    for (int i = root; i >= 0; i--) {
      Node& n = nodes_[size_t(i)];
      if (!n.grad.empty() && n.back) n.back(*this, i);
    }
  }

  void clear() { nodes_.clear(); }
  size_t node_count() const { return nodes_.size(); }

  // --- operations ----------------------------------------------------------

  // 2D convolution on [Cin,H,W] with weight [Cout,Cin,kh,kw] and bias [Cout].
  // Explicit per-side padding; output [Cout,Ho,Wo].
  int conv2d(int x, int w, int b, int stride, int pad_top, int pad_left, int pad_bottom,
             int pad_right) {
    const auto& xs = val(x).shape;
    const auto& ws = val(w).shape;
    if (xs.size() != 3 || ws.size() != 4 || xs[0] != ws[1])
      fail("nn.size", "conv2d: bad input/weight shapes");
    const int cin = xs[0], h = xs[1], wd = xs[2];
    const int cout = ws[0], kh = ws[2], kw = ws[3];
    const int ho = (h + pad_top + pad_bottom - kh) / stride + 1;
    const int wo = (wd + pad_left + pad_right - kw) / stride + 1;
    if (ho < 1 || wo < 1) fail("nn.size", "conv2d: input smaller than kernel footprint");

    Tensor<T> out({cout, ho, wo});
    {
      Tensor<T> col = im2col(val(x), kh, kw, stride, pad_top, pad_left, ho, wo);
      // out[cout, P] = W[cout, K] * col[K, P]
      const int K = cin * kh * kw, P = ho * wo;
      gemm(false, false, cout, P, K, T(1), val(w).data.data(), K, col.data.data(), P, T(0),
           out.data.data(), P);
      const T* bias = val(b).data.data();
      for (int c = 0; c < cout; c++) {
        T* row = out.data.data() + size_t(c) * P;
        for (int p = 0; p < P; p++) row[p] += bias[c];
      }
    }
    const int id = push(std::move(out), {x, w, b});
    nodes_[size_t(id)].back = [x, w, b, stride, pad_top, pad_left, kh, kw, ho, wo](Tape& t, int self) {
      const Tensor<T>& dy = t.grad(self);
      const auto& xs = t.val(x).shape;
      const int cin = xs[0], cout = t.val(w).shape[0];
      const int K = cin * kh * kw, P = ho * wo;
      if (t.needs_grad(b)) {
        T* db = t.grad(b).data.data();
        for (int c = 0; c < cout; c++) {
          double acc = 0.0;
          const T* row = dy.data.data() + size_t(c) * P;
          for (int p = 0; p < P; p++) acc += double(row[p]);
          db[c] += T(acc);
        }
      }
      if (t.needs_grad(w)) {
        Tensor<T> col = im2col(t.val(x), kh, kw, stride, pad_top, pad_left, ho, wo);
        // dW[cout, K] += dY[cout, P] * col[K, P]^T
        gemm(false, true, cout, K, P, T(1), dy.data.data(), P, col.data.data(), P, T(1),
             t.grad(w).data.data(), K);
      }
      if (t.needs_grad(x)) {
        // dcol[K, P] = W[cout, K]^T * dY[cout, P]
        Tensor<T> dcol({K, P});
        gemm(true, false, K, P, cout, T(1), t.val(w).data.data(), K, dy.data.data(), P, T(0),
             dcol.data.data(), P);
        col2im(dcol, t.grad(x), kh, kw, stride, pad_top, pad_left, ho, wo);
      }
    };
    return id;
  }

  // Instance normalization with affine over [C,H,W]; statistics in 64-bit.
  int instance_norm(int x, int gamma, int beta, double eps) {
    const auto& xs = val(x).shape;
    if (xs.size() != 3 || val(gamma).size() != xs[0] || val(beta).size() != xs[0])
      fail("nn.size", "instance_norm: bad shapes");
    const int c = xs[0];
    const int n = xs[1] * xs[2];
    Tensor<T> out(xs);
    auto stats = std::make_shared<std::vector<T>>(size_t(c) * 2);  // mu, istd per channel
    const T* xd = val(x).data.data();
    const T* g = val(gamma).data.data();
    const T* be = val(beta).data.data();
    for (int ch = 0; ch < c; ch++) {
      const T* src = xd + size_t(ch) * n;
      double mu = 0.0;
      for (int i = 0; i < n; i++) mu += double(src[i]);
      mu /= n;
      double var = 0.0;
      for (int i = 0; i < n; i++) {
        const double d = double(src[i]) - mu;
        var += d * d;
      }
      var /= n;
      const double istd = 1.0 / std::sqrt(var + eps);
      (*stats)[size_t(ch) * 2] = T(mu);
      (*stats)[size_t(ch) * 2 + 1] = T(istd);
      T* dst = out.data.data() + size_t(ch) * n;
      for (int i = 0; i < n; i++) dst[i] = g[ch] * T((double(src[i]) - mu) * istd) + be[ch];
    }
    const int id = push(std::move(out), {x, gamma, beta});
    nodes_[size_t(id)].back = [x, gamma, beta, stats, c, n](Tape& t, int self) {
      const Tensor<T>& dy = t.grad(self);
      const T* xd = t.val(x).data.data();
      const T* g = t.val(gamma).data.data();
      for (int ch = 0; ch < c; ch++) {
        const T mu = (*stats)[size_t(ch) * 2];
        const T istd = (*stats)[size_t(ch) * 2 + 1];
        const T* dyc = dy.data.data() + size_t(ch) * n;
        const T* xc = xd + size_t(ch) * n;
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int i = 0; i < n; i++) {
          const double xhat = double(xc[i] - mu) * double(istd);
          sum_dy += double(dyc[i]);
          sum_dy_xhat += double(dyc[i]) * xhat;
        }
        if (t.needs_grad(gamma)) t.grad(gamma).data[size_t(ch)] += T(sum_dy_xhat);
        if (t.needs_grad(beta)) t.grad(beta).data[size_t(ch)] += T(sum_dy);
        if (t.needs_grad(x)) {
          T* dxc = t.grad(x).data.data() + size_t(ch) * n;
          const double k = double(g[ch]) * double(istd) / n;
          for (int i = 0; i < n; i++) {
            const double xhat = double(xc[i] - mu) * double(istd);
            dxc[i] += T(k * (n * double(dyc[i]) - sum_dy - xhat * sum_dy_xhat));
          }
        }
      }
    };
    return id;
  }

  int relu(int x) {
    Tensor<T> out(val(x).shape);
    const T* src = val(x).data.data();
    for (size_t i = 0; i < out.data.size(); i++) out.data[i] = src[i] > T(0) ? src[i] : T(0);
    const int id = push(std::move(out), {x});
    nodes_[size_t(id)].back = [x](Tape& t, int self) {
      if (!t.needs_grad(x)) return;
      const Tensor<T>& dy = t.grad(self);
      const T* src = t.val(x).data.data();
      T* dx = t.grad(x).data.data();
      for (size_t i = 0; i < dy.data.size(); i++)
        if (src[i] > T(0)) dx[i] += dy.data[i];
    };
    return id;
  }

  int leaky_relu(int x, T slope) {
    Tensor<T> out(val(x).shape);
    const T* src = val(x).data.data();
    for (size_t i = 0; i < out.data.size(); i++)
      out.data[i] = src[i] > T(0) ? src[i] : slope * src[i];
    const int id = push(std::move(out), {x});
    nodes_[size_t(id)].back = [x, slope](Tape& t, int self) {
      if (!t.needs_grad(x)) return;
      const Tensor<T>& dy = t.grad(self);
      const T* src = t.val(x).data.data();
      T* dx = t.grad(x).data.data();
      for (size_t i = 0; i < dy.data.size(); i++)
        dx[i] += src[i] > T(0) ? dy.data[i] : slope * dy.data[i];
    };
    return id;
  }

  // Orthonormal 2x2 Haar analysis: [C,H,W] -> [4C,H/2,W/2], channel blocks
  // ordered LL, LH, HL, HH. Lossless; the adjoint equals the inverse.
  int haar_down(int x) {
    const auto& xs = val(x).shape;
    if (xs.size() != 3 || xs[1] % 2 != 0 || xs[2] % 2 != 0)
      fail("nn.size", "haar_down: dims must be even");
    Tensor<T> out({xs[0] * 4, xs[1] / 2, xs[2] / 2});
    haar_forward(val(x), out);
    const int id = push(std::move(out), {x});
    nodes_[size_t(id)].back = [x](Tape& t, int self) {
      if (!t.needs_grad(x)) return;
      haar_inverse_add(t.grad(self), t.grad(x));
    };
    return id;
  }

  // Inverse Haar: [4C,h,w] -> [C,2h,2w].
  int haar_up(int x) {
    const auto& xs = val(x).shape;
    if (xs.size() != 3 || xs[0] % 4 != 0) fail("nn.size", "haar_up: channels must be 4k");
    Tensor<T> out({xs[0] / 4, xs[1] * 2, xs[2] * 2});
    std::fill(out.data.begin(), out.data.end(), T(0));
    haar_inverse_add(val(x), out);
    const int id = push(std::move(out), {x});
    nodes_[size_t(id)].back = [x](Tape& t, int self) {
      if (!t.needs_grad(x)) return;
      Tensor<T> tmp(t.val(x).shape);
      haar_forward(t.grad(self), tmp);
      T* dx = t.grad(x).data.data();
      for (size_t i = 0; i < tmp.data.size(); i++) dx[i] += tmp.data[i];
    };
    return id;
  }

  int concat_channels(int a, int b) {
    const auto& as = val(a).shape;
    const auto& bs = val(b).shape;
    if (as.size() != 3 || bs.size() != 3 || as[1] != bs[1] || as[2] != bs[2])
      fail("nn.size", "concat: spatial dims differ");
    Tensor<T> out({as[0] + bs[0], as[1], as[2]});
    std::copy(val(a).data.begin(), val(a).data.end(), out.data.begin());
    std::copy(val(b).data.begin(), val(b).data.end(), out.data.begin() + val(a).size());
    const int id = push(std::move(out), {a, b});
    nodes_[size_t(id)].back = [a, b](Tape& t, int self) {
      const Tensor<T>& dy = t.grad(self);
      const size_t na = t.val(a).data.size();
      if (t.needs_grad(a)) {
        T* da = t.grad(a).data.data();
        for (size_t i = 0; i < na; i++) da[i] += dy.data[i];
      }
      if (t.needs_grad(b)) {
        T* db = t.grad(b).data.data();
        for (size_t i = 0; i < dy.data.size() - na; i++) db[i] += dy.data[na + i];
      }
    };
    return id;
  }

  int slice_channels(int x, int from, int to) {
    const auto& xs = val(x).shape;
    if (xs.size() != 3 || from < 0 || to > xs[0] || from >= to)
      fail("nn.size", "slice_channels: bad range");
    const size_t plane = size_t(xs[1]) * xs[2];
    Tensor<T> out({to - from, xs[1], xs[2]});
    std::copy(val(x).data.begin() + from * plane, val(x).data.begin() + to * plane,
              out.data.begin());
    const int id = push(std::move(out), {x});
    nodes_[size_t(id)].back = [x, from, plane](Tape& t, int self) {
      if (!t.needs_grad(x)) return;
      const Tensor<T>& dy = t.grad(self);
      T* dx = t.grad(x).data.data() + from * plane;
      for (size_t i = 0; i < dy.data.size(); i++) dx[i] += dy.data[i];
    };
    return id;
  }

  int add(int a, int b) {
    if (val(a).shape != val(b).shape) fail("nn.size", "add: shape mismatch");
    Tensor<T> out(val(a).shape);
    const T* pa = val(a).data.data();
    const T* pb = val(b).data.data();
    for (size_t i = 0; i < out.data.size(); i++) out.data[i] = pa[i] + pb[i];
    const int id = push(std::move(out), {a, b});
    nodes_[size_t(id)].back = [a, b](Tape& t, int self) {
      const Tensor<T>& dy = t.grad(self);
      for (const int p : {a, b}) {
        if (!t.needs_grad(p)) continue;
        T* dp = t.grad(p).data.data();
        for (size_t i = 0; i < dy.data.size(); i++) dp[i] += dy.data[i];
      }
    };
    return id;
  }

  // Shared fully connected map over spatial locations: x[C,H,W] with w[C]
  // yields one scalar per location, [H*W]. Each location scores the image
  // patch inside its receptive field.
  int fc_map(int x, int w, int b) {
    const auto& xs = val(x).shape;
    if (xs.size() != 3 || val(w).size() != xs[0] || val(b).size() != 1)
      fail("nn.size", "fc_map: weight length must equal the channel count");
    const int c = xs[0], p = xs[1] * xs[2];
    Tensor<T> out({p});
    const T* xd = val(x).data.data();
    const T* wd = val(w).data.data();
    const T bias = val(b).data[0];
    for (int i = 0; i < p; i++) {
      double acc = double(bias);
      for (int ch = 0; ch < c; ch++) acc += double(wd[ch]) * double(xd[size_t(ch) * p + i]);
      out.data[size_t(i)] = T(acc);
    }
    const int id = push(std::move(out), {x, w, b});
    nodes_[size_t(id)].back = [x, w, b, c, p](Tape& t, int self) {
      const Tensor<T>& dy = t.grad(self);
      const T* xd = t.val(x).data.data();
      const T* wd = t.val(w).data.data();
      if (t.needs_grad(b)) {
        double acc = 0.0;
        for (int i = 0; i < p; i++) acc += double(dy.data[size_t(i)]);
        t.grad(b).data[0] += T(acc);
      }
      if (t.needs_grad(w)) {
        T* dw = t.grad(w).data.data();
        for (int ch = 0; ch < c; ch++) {
          double acc = 0.0;
          const T* row = xd + size_t(ch) * p;
          for (int i = 0; i < p; i++) acc += double(dy.data[size_t(i)]) * double(row[i]);
          dw[ch] += T(acc);
        }
      }
      if (t.needs_grad(x)) {
        T* dx = t.grad(x).data.data();
        for (int ch = 0; ch < c; ch++) {
          T* row = dx + size_t(ch) * p;
          const T wc = wd[ch];
          for (int i = 0; i < p; i++) row[i] += dy.data[size_t(i)] * wc;
        }
      }
    };
    return id;
  }

  // mean of all elements.
  int mean_all(int x) {
    const size_t n = val(x).data.size();
    double acc = 0.0;
    for (const T v : val(x).data) acc += double(v);
    Tensor<T> out({1});
    out.data[0] = T(acc / double(n));
    const int id = push(std::move(out), {x});
    nodes_[size_t(id)].back = [x, n](Tape& t, int self) {
      if (!t.needs_grad(x)) return;
      const T g = t.grad(self).data[0] / T(n);
      T* dx = t.grad(x).data.data();
      for (size_t i = 0; i < n; i++) dx[i] += g;
    };
    return id;
  }

  // mean over elements of (s - target)^2; the LSGAN losses applied to a
  // patch-score vector (or to a single scalar score).
  int lsgan_mse(int scores, T target) {
    const size_t n = val(scores).data.size();
    double acc = 0.0;
    for (const T v : val(scores).data) {
      const double d = double(v) - double(target);
      acc += d * d;
    }
    Tensor<T> out({1});
    out.data[0] = T(acc / double(n));
    const int id = push(std::move(out), {scores});
    nodes_[size_t(id)].back = [scores, target, n](Tape& t, int self) {
      if (!t.needs_grad(scores)) return;
      const T g = t.grad(self).data[0] * T(2) / T(n);
      const T* s = t.val(scores).data.data();
      T* ds = t.grad(scores).data.data();
      for (size_t i = 0; i < n; i++) ds[i] += g * (s[i] - target);
    };
    return id;
  }

  // mean |a - b| over all elements.
  int l1_mean(int a, int b) {
    if (val(a).shape != val(b).shape) fail("nn.size", "l1_mean: shape mismatch");
    const size_t n = val(a).data.size();
    double acc = 0.0;
    const T* pa = val(a).data.data();
    const T* pb = val(b).data.data();
    for (size_t i = 0; i < n; i++) acc += std::abs(double(pa[i]) - double(pb[i]));
    Tensor<T> out({1});
    out.data[0] = T(acc / double(n));
    const int id = push(std::move(out), {a, b});
    nodes_[size_t(id)].back = [a, b, n](Tape& t, int self) {
      const T g = t.grad(self).data[0] / T(n);
      const T* pa = t.val(a).data.data();
      const T* pb = t.val(b).data.data();
      T* da = t.needs_grad(a) ? t.grad(a).data.data() : nullptr;
      T* db = t.needs_grad(b) ? t.grad(b).data.data() : nullptr;
      for (size_t i = 0; i < n; i++) {
        const T s = pa[i] > pb[i] ? T(1) : (pa[i] < pb[i] ? T(-1) : T(0));
        if (da) da[i] += g * s;
        if (db) db[i] -= g * s;
      }
    };
    return id;
  }

  int weighted_sum(const std::vector<int>& terms, const std::vector<T>& coeffs) {
    if (terms.size() != coeffs.size() || terms.empty())
      fail("nn.gradient", "weighted_sum: term/coefficient mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < terms.size(); i++) acc += double(coeffs[i]) * double(scalar(terms[i]));
    Tensor<T> out({1});
    out.data[0] = T(acc);
    const int id = push(std::move(out), terms);
    nodes_[size_t(id)].back = [terms, coeffs](Tape& t, int self) {
      const T g = t.grad(self).data[0];
      for (size_t i = 0; i < terms.size(); i++)
        if (t.needs_grad(terms[i])) t.grad(terms[i]).data[0] += g * coeffs[i];
    };
    return id;
  }

  // sum of all elements (test utility).
  int sum_all(int x) {
    double acc = 0.0;
    for (const T v : val(x).data) acc += double(v);
    Tensor<T> out({1});
    out.data[0] = T(acc);
    const int id = push(std::move(out), {x});
    nodes_[size_t(id)].back = [x](Tape& t, int self) {
      if (!t.needs_grad(x)) return;
      const T g = t.grad(self).data[0];
      T* dx = t.grad(x).data.data();
      for (size_t i = 0; i < t.val(x).data.size(); i++) dx[i] += g;
    };
    return id;
  }

private:
  struct Node {
    Tensor<T> storage;
    const Tensor<T>* external = nullptr;
    Tensor<T> grad;
    bool needs_grad = false;
    std::function<void(Tape&, int)> back;
  };

  int push(Tensor<T> out, const std::vector<int>& parents) {
    Node n;
    n.storage = std::move(out);
    n.needs_grad = false;
    for (const int p : parents) n.needs_grad = n.needs_grad || nodes_[size_t(p)].needs_grad;
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
  }

  static Tensor<T> im2col(const Tensor<T>& x, int kh, int kw, int stride, int pad_top,
                          int pad_left, int ho, int wo) {
    const int cin = x.shape[0], h = x.shape[1], w = x.shape[2];
    Tensor<T> col({cin * kh * kw, ho * wo});
    T* dst = col.data.data();
    for (int ci = 0; ci < cin; ci++) {
      const T* src = x.data.data() + size_t(ci) * h * w;
      for (int ki = 0; ki < kh; ki++) {
        for (int kj = 0; kj < kw; kj++) {
          for (int oy = 0; oy < ho; oy++) {
            const int iy = oy * stride + ki - pad_top;
            if (iy < 0 || iy >= h) {
              for (int ox = 0; ox < wo; ox++) *dst++ = T(0);
              continue;
            }
            const T* row = src + size_t(iy) * w;
            for (int ox = 0; ox < wo; ox++) {
              const int ix = ox * stride + kj - pad_left;
              *dst++ = (ix < 0 || ix >= w) ? T(0) : row[ix];
            }
          }
        }
      }
    }
    return col;
  }

  static void col2im(const Tensor<T>& col, Tensor<T>& dx, int kh, int kw, int stride, int pad_top,
                     int pad_left, int ho, int wo) {
    const int cin = dx.shape[0], h = dx.shape[1], w = dx.shape[2];
    const T* src = col.data.data();
    for (int ci = 0; ci < cin; ci++) {
      T* dst = dx.data.data() + size_t(ci) * h * w;
      for (int ki = 0; ki < kh; ki++) {
        for (int kj = 0; kj < kw; kj++) {
          for (int oy = 0; oy < ho; oy++) {
            const int iy = oy * stride + ki - pad_top;
            if (iy < 0 || iy >= h) {
              src += wo;
              continue;
            }
            T* row = dst + size_t(iy) * w;
            for (int ox = 0; ox < wo; ox++) {
              const int ix = ox * stride + kj - pad_left;
              if (ix >= 0 && ix < w) row[ix] += src[ox];
            }
            src += wo;
          }
        }
      }
    }
  }

  // x[C,H,W] -> y[4C,h,w]; block [a b; c d] maps to
  // LL=(a+b+c+d)/2, LH=(a+b-c-d)/2, HL=(a-b+c-d)/2, HH=(a-b-c+d)/2.
  static void haar_forward(const Tensor<T>& x, Tensor<T>& y) {
    const int c = x.shape[0], h = x.shape[1], w = x.shape[2];
    const int hh = h / 2, hw = w / 2;
    const size_t plane = size_t(hh) * hw;
    for (int ch = 0; ch < c; ch++) {
      const T* src = x.data.data() + size_t(ch) * h * w;
      T* pll = y.data.data() + size_t(ch) * plane;
      T* plh = y.data.data() + size_t(c + ch) * plane;
      T* phl = y.data.data() + size_t(2 * c + ch) * plane;
      T* phh = y.data.data() + size_t(3 * c + ch) * plane;
      for (int r = 0; r < hh; r++) {
        const T* r0 = src + size_t(2 * r) * w;
        const T* r1 = r0 + w;
        for (int q = 0; q < hw; q++) {
          const T a = r0[2 * q], b = r0[2 * q + 1], cc = r1[2 * q], d = r1[2 * q + 1];
          const size_t o = size_t(r) * hw + q;
          pll[o] = (a + b + cc + d) * T(0.5);
          plh[o] = (a + b - cc - d) * T(0.5);
          phl[o] = (a - b + cc - d) * T(0.5);
          phh[o] = (a - b - cc + d) * T(0.5);
        }
      }
    }
  }

  // y[4C,h,w] added back into x[C,2h,2w] (synthesis / adjoint of analysis).
  static void haar_inverse_add(const Tensor<T>& y, Tensor<T>& x) {
    const int c = x.shape[0], h = x.shape[1], w = x.shape[2];
    const int hh = h / 2, hw = w / 2;
    const size_t plane = size_t(hh) * hw;
    for (int ch = 0; ch < c; ch++) {
      T* dst = x.data.data() + size_t(ch) * h * w;
      const T* pll = y.data.data() + size_t(ch) * plane;
      const T* plh = y.data.data() + size_t(c + ch) * plane;
      const T* phl = y.data.data() + size_t(2 * c + ch) * plane;
      const T* phh = y.data.data() + size_t(3 * c + ch) * plane;
      for (int r = 0; r < hh; r++) {
        T* r0 = dst + size_t(2 * r) * w;
        T* r1 = r0 + w;
        for (int q = 0; q < hw; q++) {
          const size_t o = size_t(r) * hw + q;
          const T ll = pll[o], lh = plh[o], hl = phl[o], hhv = phh[o];
          r0[2 * q] += (ll + lh + hl + hhv) * T(0.5);
          r0[2 * q + 1] += (ll + lh - hl - hhv) * T(0.5);
          r1[2 * q] += (ll - lh + hl - hhv) * T(0.5);
          r1[2 * q + 1] += (ll - lh - hl + hhv) * T(0.5);
        }
      }
    }
  }

  std::vector<Node> nodes_;
};

}  // namespace wavden::nn
