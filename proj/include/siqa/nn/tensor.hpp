#pragma once

#include <cstddef>
#include <vector>

namespace siqa::nn {

// Batch x channels x height x width, planar.
struct Tensor4 {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<double> data;

  static Tensor4 zeros(int n, int c, int h, int w) {
    Tensor4 t;
    t.n = n;
    t.c = c;
    t.h = h;
    t.w = w;
    t.data.assign(static_cast<std::size_t>(n) * c * h * w, 0.0);
    return t;
  }

  std::size_t size() const { return data.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }

  double* sample(int i) { return data.data() + static_cast<std::size_t>(i) * c * plane(); }
  const double* sample(int i) const {
    return data.data() + static_cast<std::size_t>(i) * c * plane();
  }

  double& at(int i, int ci, int y, int x) {
    return data[((static_cast<std::size_t>(i) * c + ci) * h + y) * w + x];
  }
  double at(int i, int ci, int y, int x) const {
    return data[((static_cast<std::size_t>(i) * c + ci) * h + y) * w + x];
  }

  bool same_shape(const Tensor4& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
};

}  // namespace siqa::nn
