#pragma once

#include <cstdint>
#include <vector>

#include "siqa/nn/tensor.hpp"

namespace siqa::nn {

// 3x3 convolution parameters, kernels laid out [out][in][ky][kx].
struct ConvParams {
  int in_channels = 0;
  int out_channels = 0;
  std::vector<double> kernels;  // out*in*9
  std::vector<double> bias;     // out

  std::size_t kernel_count() const { return kernels.size(); }
};

struct ConvGrads {
  std::vector<double> kernels;
  std::vector<double> bias;
};

// Stride 1, zero padding 1: shape preserving cross-correlation.
Tensor4 conv3x3_forward(const Tensor4& x, const ConvParams& p);
// Returns the gradient w.r.t. the input; kernel/bias gradients are
// accumulated into `grads`.
Tensor4 conv3x3_backward(const Tensor4& x, const Tensor4& grad_y,
                         const ConvParams& p, ConvGrads& grads);

Tensor4 relu_forward(const Tensor4& x);
Tensor4 relu_backward(const Tensor4& x, const Tensor4& grad_y);

struct PoolResult {
  Tensor4 y;
  std::vector<std::int32_t> argmax;  // flat input offset per output element
};

// 2x2 stride-2 max pooling. Ties route to the first maximum in row-major
// order. Requires even spatial dimensions.
PoolResult maxpool2x2_forward(const Tensor4& x);
Tensor4 maxpool2x2_backward(const Tensor4& x, const Tensor4& grad_y,
                            const std::vector<std::int32_t>& argmax);

// Global average pooling to [n][c] features.
std::vector<double> gap_forward(const Tensor4& x);
Tensor4 gap_backward(const std::vector<double>& grad_f, int n, int c, int h,
                     int w);

struct HeadParams {
  int feature_dim = 0;
  std::vector<double> weights;  // 3 x feature_dim, row-major
  std::vector<double> bias;     // 3
};

struct HeadGrads {
  std::vector<double> weights;
  std::vector<double> bias;
};

// softmax(W f + b) with max subtraction. `features` is one sample's vector.
std::vector<double> head_forward(const std::vector<double>& features,
                                 const HeadParams& p);

// -log(probs[label]); probabilities are clamped at 1e-12 before the log.
double cross_entropy(const std::vector<double>& probs, int label);

// Gradient of the loss at the logits: probs - onehot(label).
std::vector<double> logit_gradient(const std::vector<double>& probs,
                                   int label);

// Backpropagates one sample's logit gradient through the head. Returns the
// feature gradient; weight/bias gradients accumulate into `grads`.
std::vector<double> head_backward(const std::vector<double>& features,
                                  const std::vector<double>& grad_logits,
                                  const HeadParams& p, HeadGrads& grads);

}  // namespace siqa::nn
