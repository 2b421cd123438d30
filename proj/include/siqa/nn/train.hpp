#pragma once

#include <cstdint>
#include <vector>

#include "siqa/dataset.hpp"
#include "siqa/nn/model.hpp"

namespace siqa::nn {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 8;
  double lr_initial = 0.01;
  double lr_reduced = 0.001;
  int lr_drop_epoch = 11;  // first 1-based epoch trained at lr_reduced
  std::uint64_t seed = 7;
  bool augment = false;
  double rotation_range = 30.0;
};

// One training/validation example: one stack for the single-branch model,
// [RGB+LS, RGB+TS] for the dual-branch model.
struct Example {
  std::vector<ChannelStack> inputs;
  int label = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  Model model;  // parameters of the best validation-accuracy epoch
  std::vector<EpochStats> curve;
  int best_epoch = 0;
};

Tensor4 stack_to_tensor(const ChannelStack& stack);

// Plain SGD over shuffled minibatches; bit-deterministic for a fixed
// (seed, config, data) triple. Throws EmptyDataset / DivergedLoss.
TrainResult train(Architecture arch, const ModelConfig& model_config,
                  const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set,
                  const TrainConfig& config);

double accuracy(const Model& model, const std::vector<Example>& set);

}  // namespace siqa::nn
