#include "siqa/nn/model.hpp"

#include <algorithm>
#include <cmath>

#include "siqa/binio.hpp"
#include "siqa/errors.hpp"
#include "siqa/netpbm.hpp"
#include "siqa/rng.hpp"

namespace siqa::nn {

Model init_model(Architecture arch, const ModelConfig& config,
                 std::uint64_t seed) {
  Model model;
  model.arch = arch;
  model.config = config;
  Rng rng(seed);

  for (int b = 0; b < model.branch_count(); ++b) {
    BackboneParams backbone;
    int in_c = config.input_channels;
    for (int width : config.widths) {
      ConvParams conv;
      conv.in_channels = in_c;
      conv.out_channels = width;
      conv.kernels.resize(static_cast<std::size_t>(width) * in_c * 9);
      const double stddev = std::sqrt(2.0 / (in_c * 9));
      for (double& k : conv.kernels) k = rng.normal(0.0, stddev);
      conv.bias.assign(width, 0.0);
      backbone.blocks.push_back(std::move(conv));
      in_c = width;
    }
    model.backbones.push_back(std::move(backbone));
  }

  model.head.feature_dim = model.feature_dim();
  model.head.weights.resize(static_cast<std::size_t>(3) * model.head.feature_dim);
  for (double& w : model.head.weights) w = rng.normal(0.0, 0.001);
  model.head.bias.resize(3);
  for (double& b : model.head.bias) b = rng.normal(0.0, 0.001);

  model.rng_state = rng.state();
  return model;
}

std::vector<double> backbone_forward(const BackboneParams& params,
                                     const Tensor4& x, BackboneTrace* trace) {
  Tensor4 current = x;
  for (const ConvParams& conv : params.blocks) {
    if (trace) trace->conv_in.push_back(current);
    Tensor4 conv_out = conv3x3_forward(current, conv);
    Tensor4 relu_out = relu_forward(conv_out);
    PoolResult pooled = maxpool2x2_forward(relu_out);
    if (trace) {
      trace->conv_out.push_back(std::move(conv_out));
      trace->relu_out.push_back(std::move(relu_out));
      current = pooled.y;
      trace->pools.push_back(std::move(pooled));
    } else {
      current = std::move(pooled.y);
    }
  }
  return gap_forward(current);
}

Tensor4 backbone_backward(const BackboneParams& params,
                          const BackboneTrace& trace,
                          const std::vector<double>& grad_features,
                          BackboneGrads& grads) {
  grads.blocks.resize(params.blocks.size());
  const int last = static_cast<int>(params.blocks.size()) - 1;
  const Tensor4& last_pool = trace.pools[last].y;
  Tensor4 grad = gap_backward(grad_features, last_pool.n, last_pool.c,
                              last_pool.h, last_pool.w);
  for (int b = last; b >= 0; --b) {
    grad = maxpool2x2_backward(trace.relu_out[b], grad, trace.pools[b].argmax);
    grad = relu_backward(trace.conv_out[b], grad);
    grad = conv3x3_backward(trace.conv_in[b], grad, params.blocks[b],
                            grads.blocks[b]);
  }
  return grad;
}

std::vector<double> model_forward(const Model& model,
                                  const std::vector<Tensor4>& inputs,
                                  ForwardTrace* trace) {
  if (static_cast<int>(inputs.size()) != model.branch_count()) {
    throw ShapeMismatch("model_forward: wrong number of branch inputs");
  }
  const int n = inputs[0].n;
  for (const Tensor4& t : inputs) {
    if (t.n != n) throw ShapeMismatch("model_forward: batch size mismatch");
    if (t.c != model.config.input_channels) {
      throw ShapeMismatch("model_forward: channel count mismatch");
    }
  }

  const int per_branch = model.config.widths.back();
  std::vector<std::vector<double>> branch_features;
  if (trace) trace->branches.resize(model.branch_count());
  for (int b = 0; b < model.branch_count(); ++b) {
    branch_features.push_back(backbone_forward(
        model.backbones[b], inputs[b], trace ? &trace->branches[b] : nullptr));
  }

  std::vector<double> probs(static_cast<std::size_t>(n) * 3);
  if (trace) trace->features.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> f;
    f.reserve(model.feature_dim());
    for (const auto& bf : branch_features) {
      f.insert(f.end(), bf.begin() + static_cast<std::size_t>(i) * per_branch,
               bf.begin() + static_cast<std::size_t>(i + 1) * per_branch);
    }
    const std::vector<double> p = head_forward(f, model.head);
    std::copy(p.begin(), p.end(), probs.begin() + static_cast<std::size_t>(i) * 3);
    if (trace) trace->features[i] = std::move(f);
  }
  return probs;
}

void model_backward(const Model& model, const std::vector<Tensor4>& inputs,
                    const ForwardTrace& trace,
                    const std::vector<double>& grad_logits, ModelGrads& grads) {
  const int n = inputs[0].n;
  const int per_branch = model.config.widths.back();
  grads.backbones.resize(model.branch_count());

  // Head backward per sample, collecting per-branch feature gradients.
  std::vector<std::vector<double>> grad_features(
      model.branch_count(),
      std::vector<double>(static_cast<std::size_t>(n) * per_branch, 0.0));
  for (int i = 0; i < n; ++i) {
    const std::vector<double> gl(grad_logits.begin() + static_cast<std::size_t>(i) * 3,
                                 grad_logits.begin() + static_cast<std::size_t>(i) * 3 + 3);
    const std::vector<double> gf =
        head_backward(trace.features[i], gl, model.head, grads.head);
    for (int b = 0; b < model.branch_count(); ++b) {
      for (int j = 0; j < per_branch; ++j) {
        grad_features[b][static_cast<std::size_t>(i) * per_branch + j] =
            gf[static_cast<std::size_t>(b) * per_branch + j];
      }
    }
  }

  for (int b = 0; b < model.branch_count(); ++b) {
    backbone_backward(model.backbones[b], trace.branches[b], grad_features[b],
                      grads.backbones[b]);
  }
}

Prediction predict(const Model& model, const std::vector<Tensor4>& inputs) {
  const std::vector<double> probs = model_forward(model, inputs, nullptr);
  Prediction pred;
  pred.probs = {probs[0], probs[1], probs[2]};
  pred.label = 0;
  for (int k = 1; k < 3; ++k) {
    if (probs[k] > pred.probs[pred.label]) pred.label = k;
  }
  return pred;
}

// --- checkpoint container ----------------------------------------------------

namespace {
constexpr char kModelMagic[4] = {'S', 'I', 'Q', 'A'};
constexpr std::uint16_t kModelVersion = 1;
}  // namespace

std::vector<std::uint8_t> encode_model(const Model& model) {
  std::vector<std::uint8_t> out;
  for (char c : kModelMagic) out.push_back(static_cast<std::uint8_t>(c));
  put_u16(out, kModelVersion);
  put_u8(out, static_cast<std::uint8_t>(model.arch));
  put_u8(out, static_cast<std::uint8_t>(model.config.blocks()));
  for (int w : model.config.widths) put_u16(out, static_cast<std::uint16_t>(w));
  put_u8(out, static_cast<std::uint8_t>(model.config.input_channels));
  put_u16(out, static_cast<std::uint16_t>(model.feature_dim()));

  auto put_params = [&out](const std::vector<double>& values) {
    for (double v : values) put_f32(out, static_cast<float>(v));
  };
  for (const BackboneParams& backbone : model.backbones) {
    for (const ConvParams& conv : backbone.blocks) {
      put_params(conv.kernels);
      put_params(conv.bias);
    }
  }
  put_params(model.head.weights);
  put_params(model.head.bias);

  put_u16(out, static_cast<std::uint16_t>(model.epoch));
  for (std::uint64_t word : model.rng_state) put_u64(out, word);
  return out;
}

Model decode_model(std::span<const std::uint8_t> bytes) {
  ByteReader reader(bytes);
  char magic[4];
  for (char& c : magic) c = static_cast<char>(reader.u8());
  if (!std::equal(magic, magic + 4, kModelMagic)) {
    throw CorruptData("checkpoint: bad magic");
  }
  if (reader.u16() != kModelVersion) throw CorruptData("checkpoint: bad version");

  Model model;
  const std::uint8_t arch = reader.u8();
  if (arch > 1) throw CorruptData("checkpoint: bad architecture tag");
  model.arch = static_cast<Architecture>(arch);

  const int blocks = reader.u8();
  if (blocks < 1) throw CorruptData("checkpoint: no blocks");
  model.config.widths.clear();
  for (int b = 0; b < blocks; ++b) model.config.widths.push_back(reader.u16());
  model.config.input_channels = reader.u8();
  const int feature_dim = reader.u16();
  if (feature_dim != model.config.widths.back() *
                         (model.arch == Architecture::dual ? 2 : 1)) {
    throw CorruptData("checkpoint: feature dim mismatch");
  }

  auto read_params = [&reader](std::vector<double>& values, std::size_t count) {
    values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = static_cast<double>(reader.f32());
    }
  };
  for (int b = 0; b < model.branch_count(); ++b) {
    BackboneParams backbone;
    int in_c = model.config.input_channels;
    for (int width : model.config.widths) {
      ConvParams conv;
      conv.in_channels = in_c;
      conv.out_channels = width;
      read_params(conv.kernels, static_cast<std::size_t>(width) * in_c * 9);
      read_params(conv.bias, width);
      backbone.blocks.push_back(std::move(conv));
      in_c = width;
    }
    model.backbones.push_back(std::move(backbone));
  }
  model.head.feature_dim = feature_dim;
  read_params(model.head.weights, static_cast<std::size_t>(3) * feature_dim);
  read_params(model.head.bias, 3);

  model.epoch = reader.u16();
  for (std::uint64_t& word : model.rng_state) word = reader.u64();
  if (reader.remaining() != 0) throw CorruptData("checkpoint: trailing bytes");
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const auto bytes = encode_model(model);
  write_file(path, std::span<const std::uint8_t>(bytes));
}

Model load_model(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_model(bytes);
}

}  // namespace siqa::nn
