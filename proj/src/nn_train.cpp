#include "siqa/nn/train.hpp"

#include <cmath>
#include <numeric>

#include "siqa/errors.hpp"
#include "siqa/rng.hpp"

namespace siqa::nn {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Gathers one minibatch into per-branch tensors.
std::vector<Tensor4> gather_batch(const std::vector<Example>& set,
                                  const std::vector<int>& order,
                                  std::size_t begin, std::size_t end,
                                  int branch_count, bool do_augment,
                                  std::uint64_t augment_salt,
                                  double rotation_range) {
  const int n = static_cast<int>(end - begin);
  std::vector<Tensor4> inputs;
  for (int b = 0; b < branch_count; ++b) {
    const ChannelStack& proto = set[order[begin]].inputs[b];
    inputs.push_back(Tensor4::zeros(n, proto.channels, proto.height, proto.width));
  }
  for (std::size_t k = begin; k < end; ++k) {
    const Example& ex = set[order[k]];
    if (static_cast<int>(ex.inputs.size()) != branch_count) {
      throw ShapeMismatch("example arity does not match architecture");
    }
    for (int b = 0; b < branch_count; ++b) {
      const ChannelStack* stack = &ex.inputs[b];
      ChannelStack augmented;
      if (do_augment) {
        // Both branches of one sample share the seed, hence the transform.
        augmented = augment(*stack, mix(augment_salt, order[k]), rotation_range);
        stack = &augmented;
      }
      Tensor4& t = inputs[b];
      if (stack->height != t.h || stack->width != t.w || stack->channels != t.c) {
        throw ShapeMismatch("inconsistent stack shapes in dataset");
      }
      double* dst = t.sample(static_cast<int>(k - begin));
      for (std::size_t i = 0; i < stack->data.size(); ++i) {
        dst[i] = static_cast<double>(stack->data[i]);
      }
    }
  }
  return inputs;
}

void sgd_step(Model& model, const ModelGrads& grads, double lr, int batch) {
  const double scale = lr / batch;
  for (std::size_t b = 0; b < model.backbones.size(); ++b) {
    for (std::size_t blk = 0; blk < model.backbones[b].blocks.size(); ++blk) {
      ConvParams& conv = model.backbones[b].blocks[blk];
      const ConvGrads& g = grads.backbones[b].blocks[blk];
      for (std::size_t i = 0; i < conv.kernels.size(); ++i) {
        conv.kernels[i] -= scale * g.kernels[i];
      }
      for (std::size_t i = 0; i < conv.bias.size(); ++i) {
        conv.bias[i] -= scale * g.bias[i];
      }
    }
  }
  for (std::size_t i = 0; i < model.head.weights.size(); ++i) {
    model.head.weights[i] -= scale * grads.head.weights[i];
  }
  for (std::size_t i = 0; i < model.head.bias.size(); ++i) {
    model.head.bias[i] -= scale * grads.head.bias[i];
  }
}

}  // namespace

Tensor4 stack_to_tensor(const ChannelStack& stack) {
  Tensor4 t = Tensor4::zeros(1, stack.channels, stack.height, stack.width);
  for (std::size_t i = 0; i < stack.data.size(); ++i) {
    t.data[i] = static_cast<double>(stack.data[i]);
  }
  return t;
}

double accuracy(const Model& model, const std::vector<Example>& set) {
  if (set.empty()) return 0.0;
  std::size_t correct = 0;
  for (const Example& ex : set) {
    std::vector<Tensor4> inputs;
    for (const ChannelStack& s : ex.inputs) inputs.push_back(stack_to_tensor(s));
    if (predict(model, inputs).label == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

TrainResult train(Architecture arch, const ModelConfig& model_config,
                  const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set,
                  const TrainConfig& config) {
  if (train_set.empty()) throw EmptyDataset("empty training set");
  for (const Example& ex : train_set) {
    if (ex.label < 0 || ex.label > 2) throw EmptyDataset("label out of range");
  }

  Model model = init_model(arch, model_config, config.seed);
  Rng rng(mix(config.seed, 0x7a91));

  TrainResult result;
  result.best_epoch = 0;
  double best_acc = -1.0;

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr =
        epoch >= config.lr_drop_epoch ? config.lr_reduced : config.lr_initial;

    // Fisher-Yates with the training stream; deterministic per epoch.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = rng.uniform_int(i);
      std::swap(order[i - 1], order[j]);
    }

    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += config.batch_size) {
      const std::size_t end =
          std::min(begin + config.batch_size, order.size());
      const std::vector<Tensor4> inputs = gather_batch(
          train_set, order, begin, end, model.branch_count(), config.augment,
          mix(config.seed, 0xa1u + epoch), config.rotation_range);

      ForwardTrace trace;
      const std::vector<double> probs = model_forward(model, inputs, &trace);

      const int n = static_cast<int>(end - begin);
      std::vector<double> grad_logits(static_cast<std::size_t>(n) * 3);
      for (int i = 0; i < n; ++i) {
        const int label = train_set[order[begin + i]].label;
        const std::vector<double> p(probs.begin() + static_cast<std::size_t>(i) * 3,
                                    probs.begin() + static_cast<std::size_t>(i) * 3 + 3);
        const double loss = cross_entropy(p, label);
        if (!std::isfinite(loss)) throw DivergedLoss("non-finite training loss");
        loss_sum += loss;
        const std::vector<double> g = logit_gradient(p, label);
        std::copy(g.begin(), g.end(),
                  grad_logits.begin() + static_cast<std::size_t>(i) * 3);
      }
      seen += end - begin;

      ModelGrads grads;
      model_backward(model, inputs, trace, grad_logits, grads);
      sgd_step(model, grads, lr, n);
    }

    const double train_loss = loss_sum / static_cast<double>(seen);
    if (!std::isfinite(train_loss)) throw DivergedLoss("non-finite epoch loss");
    const double val_acc = accuracy(model, val_set);
    result.curve.push_back({epoch, train_loss, val_acc, lr});

    if (val_acc > best_acc) {
      best_acc = val_acc;
      result.best_epoch = epoch;
      result.model = model;
      result.model.epoch = epoch;
      result.model.rng_state = rng.state();
    }
  }
  return result;
}

}  // namespace siqa::nn
