#include "siqa/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "siqa/errors.hpp"

namespace siqa::nn {

Tensor4 conv3x3_forward(const Tensor4& x, const ConvParams& p) {
  if (x.c != p.in_channels) throw ShapeMismatch("conv3x3: channel mismatch");
  if (p.kernels.size() !=
      static_cast<std::size_t>(p.out_channels) * p.in_channels * 9 ||
      p.bias.size() != static_cast<std::size_t>(p.out_channels)) {
    throw ShapeMismatch("conv3x3: parameter layout mismatch");
  }
  const int h = x.h, w = x.w;
  Tensor4 y = Tensor4::zeros(x.n, p.out_channels, h, w);
  for (int i = 0; i < x.n; ++i) {
    for (int oc = 0; oc < p.out_channels; ++oc) {
      const double bias = p.bias[oc];
      for (int yy = 0; yy < h; ++yy) {
        for (int xx = 0; xx < w; ++xx) {
          double acc = bias;
          for (int ic = 0; ic < p.in_channels; ++ic) {
            const double* kernel =
                &p.kernels[(static_cast<std::size_t>(oc) * p.in_channels + ic) * 9];
            for (int ky = -1; ky <= 1; ++ky) {
              const int sy = yy + ky;
              if (sy < 0 || sy >= h) continue;
              for (int kx = -1; kx <= 1; ++kx) {
                const int sx = xx + kx;
                if (sx < 0 || sx >= w) continue;
                acc += kernel[(ky + 1) * 3 + (kx + 1)] * x.at(i, ic, sy, sx);
              }
            }
          }
          y.at(i, oc, yy, xx) = acc;
        }
      }
    }
  }
  return y;
}

Tensor4 conv3x3_backward(const Tensor4& x, const Tensor4& grad_y,
                         const ConvParams& p, ConvGrads& grads) {
  if (grad_y.n != x.n || grad_y.c != p.out_channels || grad_y.h != x.h ||
      grad_y.w != x.w) {
    throw ShapeMismatch("conv3x3_backward: gradient shape mismatch");
  }
  grads.kernels.resize(p.kernels.size(), 0.0);
  grads.bias.resize(p.bias.size(), 0.0);

  Tensor4 grad_x = Tensor4::zeros(x.n, x.c, x.h, x.w);
  const int h = x.h, w = x.w;
  for (int i = 0; i < x.n; ++i) {
    for (int oc = 0; oc < p.out_channels; ++oc) {
      for (int yy = 0; yy < h; ++yy) {
        for (int xx = 0; xx < w; ++xx) {
          const double g = grad_y.at(i, oc, yy, xx);
          if (g == 0.0) continue;
          grads.bias[oc] += g;
          for (int ic = 0; ic < p.in_channels; ++ic) {
            const std::size_t kbase =
                (static_cast<std::size_t>(oc) * p.in_channels + ic) * 9;
            for (int ky = -1; ky <= 1; ++ky) {
              const int sy = yy + ky;
              if (sy < 0 || sy >= h) continue;
              for (int kx = -1; kx <= 1; ++kx) {
                const int sx = xx + kx;
                if (sx < 0 || sx >= w) continue;
                const std::size_t ki = kbase + (ky + 1) * 3 + (kx + 1);
                grads.kernels[ki] += g * x.at(i, ic, sy, sx);
                grad_x.at(i, ic, sy, sx) += g * p.kernels[ki];
              }
            }
          }
        }
      }
    }
  }
  return grad_x;
}

Tensor4 relu_forward(const Tensor4& x) {
  Tensor4 y = x;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor4 relu_backward(const Tensor4& x, const Tensor4& grad_y) {
  if (!x.same_shape(grad_y)) throw ShapeMismatch("relu_backward shape");
  Tensor4 grad_x = grad_y;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    if (x.data[i] <= 0.0) grad_x.data[i] = 0.0;
  }
  return grad_x;
}

PoolResult maxpool2x2_forward(const Tensor4& x) {
  if (x.h % 2 != 0 || x.w % 2 != 0) {
    throw OddDimension("maxpool2x2 requires even spatial dimensions");
  }
  const int oh = x.h / 2, ow = x.w / 2;
  PoolResult result;
  result.y = Tensor4::zeros(x.n, x.c, oh, ow);
  result.argmax.assign(result.y.size(), 0);
  std::size_t out_idx = 0;
  for (int i = 0; i < x.n; ++i) {
    for (int ci = 0; ci < x.c; ++ci) {
      for (int yy = 0; yy < oh; ++yy) {
        for (int xx = 0; xx < ow; ++xx, ++out_idx) {
          double best = -1e300;
          std::int32_t best_at = 0;
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const int sy = 2 * yy + dy, sx = 2 * xx + dx;
              const double v = x.at(i, ci, sy, sx);
              if (v > best) {  // strict: ties keep the first in row-major order
                best = v;
                best_at = static_cast<std::int32_t>(
                    ((static_cast<std::size_t>(i) * x.c + ci) * x.h + sy) * x.w +
                    sx);
              }
            }
          }
          result.y.at(i, ci, yy, xx) = best;
          result.argmax[out_idx] = best_at;
        }
      }
    }
  }
  return result;
}

Tensor4 maxpool2x2_backward(const Tensor4& x, const Tensor4& grad_y,
                            const std::vector<std::int32_t>& argmax) {
  if (grad_y.size() != argmax.size()) {
    throw ShapeMismatch("maxpool2x2_backward: argmax mismatch");
  }
  Tensor4 grad_x = Tensor4::zeros(x.n, x.c, x.h, x.w);
  for (std::size_t i = 0; i < argmax.size(); ++i) {
    grad_x.data[argmax[i]] += grad_y.data[i];
  }
  return grad_x;
}

std::vector<double> gap_forward(const Tensor4& x) {
  std::vector<double> f(static_cast<std::size_t>(x.n) * x.c, 0.0);
  const std::size_t plane = x.plane();
  for (int i = 0; i < x.n; ++i) {
    for (int ci = 0; ci < x.c; ++ci) {
      const double* p = x.data.data() + (static_cast<std::size_t>(i) * x.c + ci) * plane;
      double acc = 0.0;
      for (std::size_t k = 0; k < plane; ++k) acc += p[k];
      f[static_cast<std::size_t>(i) * x.c + ci] = acc / static_cast<double>(plane);
    }
  }
  return f;
}

Tensor4 gap_backward(const std::vector<double>& grad_f, int n, int c, int h,
                     int w) {
  if (grad_f.size() != static_cast<std::size_t>(n) * c) {
    throw ShapeMismatch("gap_backward: feature gradient mismatch");
  }
  Tensor4 grad_x = Tensor4::zeros(n, c, h, w);
  const std::size_t plane = grad_x.plane();
  const double inv = 1.0 / static_cast<double>(plane);
  for (int i = 0; i < n; ++i) {
    for (int ci = 0; ci < c; ++ci) {
      const double g = grad_f[static_cast<std::size_t>(i) * c + ci] * inv;
      double* p = grad_x.data.data() + (static_cast<std::size_t>(i) * c + ci) * plane;
      for (std::size_t k = 0; k < plane; ++k) p[k] = g;
    }
  }
  return grad_x;
}

std::vector<double> head_forward(const std::vector<double>& features,
                                 const HeadParams& p) {
  if (features.size() != static_cast<std::size_t>(p.feature_dim) ||
      p.weights.size() != static_cast<std::size_t>(3) * p.feature_dim ||
      p.bias.size() != 3) {
    throw ShapeMismatch("head_forward: dimension mismatch");
  }
  double logits[3];
  for (int k = 0; k < 3; ++k) {
    double acc = p.bias[k];
    const double* row = &p.weights[static_cast<std::size_t>(k) * p.feature_dim];
    for (int j = 0; j < p.feature_dim; ++j) acc += row[j] * features[j];
    logits[k] = acc;
  }
  const double m = std::max({logits[0], logits[1], logits[2]});
  double sum = 0.0;
  std::vector<double> probs(3);
  for (int k = 0; k < 3; ++k) {
    probs[k] = std::exp(logits[k] - m);
    sum += probs[k];
  }
  for (double& v : probs) v /= sum;
  return probs;
}

double cross_entropy(const std::vector<double>& probs, int label) {
  return -std::log(std::max(probs[label], 1e-12));
}

std::vector<double> logit_gradient(const std::vector<double>& probs,
                                   int label) {
  std::vector<double> g = probs;
  g[label] -= 1.0;
  return g;
}

std::vector<double> head_backward(const std::vector<double>& features,
                                  const std::vector<double>& grad_logits,
                                  const HeadParams& p, HeadGrads& grads) {
  grads.weights.resize(p.weights.size(), 0.0);
  grads.bias.resize(3, 0.0);
  std::vector<double> grad_f(p.feature_dim, 0.0);
  for (int k = 0; k < 3; ++k) {
    const double g = grad_logits[k];
    grads.bias[k] += g;
    const double* row = &p.weights[static_cast<std::size_t>(k) * p.feature_dim];
    double* grow = &grads.weights[static_cast<std::size_t>(k) * p.feature_dim];
    for (int j = 0; j < p.feature_dim; ++j) {
      grow[j] += g * features[j];
      grad_f[j] += g * row[j];
    }
  }
  return grad_f;
}

}  // namespace siqa::nn
