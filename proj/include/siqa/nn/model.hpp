#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "siqa/nn/layers.hpp"
#include "siqa/nn/tensor.hpp"

namespace siqa::nn {

enum class Architecture : std::uint8_t { single = 0, dual = 1 };

// Backbone layout: blocks of [3x3 conv, ReLU, 2x2 maxpool] followed by GAP.
struct ModelConfig {
  std::vector<int> widths = {8, 16, 32};
  int input_channels = 5;  // per branch: 5 (single) or 4 (dual)

  int blocks() const { return static_cast<int>(widths.size()); }
};

struct BackboneParams {
  std::vector<ConvParams> blocks;
};

struct BackboneGrads {
  std::vector<ConvGrads> blocks;
};

struct Model {
  Architecture arch = Architecture::single;
  ModelConfig config;
  std::vector<BackboneParams> backbones;  // one entry, or two for dual
  HeadParams head;
  int epoch = 0;  // epoch the parameters were taken from
  std::array<std::uint64_t, 4> rng_state{};

  int branch_count() const { return arch == Architecture::dual ? 2 : 1; }
  int feature_dim() const {
    return config.widths.back() * branch_count();
  }
};

// Head weights ~ N(0, 0.001^2); conv kernels He-scaled, conv bias zero.
Model init_model(Architecture arch, const ModelConfig& config,
                 std::uint64_t seed);

struct BackboneTrace {
  std::vector<Tensor4> conv_in;
  std::vector<Tensor4> conv_out;
  std::vector<Tensor4> relu_out;
  std::vector<PoolResult> pools;
};

// Runs one branch over a batch; returns GAP features [n * width.back()].
std::vector<double> backbone_forward(const BackboneParams& params,
                                     const Tensor4& x, BackboneTrace* trace);

Tensor4 backbone_backward(const BackboneParams& params,
                          const BackboneTrace& trace,
                          const std::vector<double>& grad_features,
                          BackboneGrads& grads);

struct ForwardTrace {
  std::vector<BackboneTrace> branches;
  std::vector<std::vector<double>> features;  // concatenated, per sample
};

// inputs.size() must equal branch_count(); all tensors share the batch size.
// Returns per-sample class probabilities, n x 3 row-major.
std::vector<double> model_forward(const Model& model,
                                  const std::vector<Tensor4>& inputs,
                                  ForwardTrace* trace = nullptr);

struct ModelGrads {
  std::vector<BackboneGrads> backbones;
  HeadGrads head;
};

// Backward for a whole batch given per-sample logit gradients (n x 3).
void model_backward(const Model& model, const std::vector<Tensor4>& inputs,
                    const ForwardTrace& trace,
                    const std::vector<double>& grad_logits, ModelGrads& grads);

struct Prediction {
  int label = 0;  // argmax, ties toward the lower class index
  std::array<double, 3> probs{};
};

Prediction predict(const Model& model, const std::vector<Tensor4>& inputs);

// --- checkpoint container ----------------------------------------------------

std::vector<std::uint8_t> encode_model(const Model& model);
Model decode_model(std::span<const std::uint8_t> bytes);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace siqa::nn
