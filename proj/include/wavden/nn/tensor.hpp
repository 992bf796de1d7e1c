#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "wavden/error.hpp"

namespace wavden::nn {

// Dense row-major tensor. Shapes are small ({C,H,W}, {Cout,Cin,kh,kw}, {N}).
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(size_t(numel(shape)), T(0));
  }

  static int64_t numel(const std::vector<int>& s) {
    int64_t n = 1;
    for (const int d : s) n *= d;
    return n;
  }

  int64_t size() const { return int64_t(data.size()); }
  int dim(size_t i) const { return shape[i]; }
  bool empty() const { return data.empty(); }

  T& operator[](size_t i) { return data[i]; }
  const T& operator[](size_t i) const { return data[i]; }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape);
    for (size_t i = 0; i < data.size(); i++) out.data[i] = U(data[i]);
    return out;
  }
};

}  // namespace wavden::nn
