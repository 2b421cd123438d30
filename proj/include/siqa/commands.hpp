#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "siqa/dataset.hpp"
#include "siqa/nn/train.hpp"

namespace siqa::cli {

enum class FovFallback { error, full_frame };

FovFallback parse_fallback(const std::string& name);

// Stack file created by `preprocess` for a given source image and order.
std::filesystem::path stack_path(const std::filesystem::path& stack_dir,
                                 const std::filesystem::path& image_path,
                                 StackOrder order);

struct PreprocessOptions {
  std::filesystem::path in_dir;
  std::filesystem::path out_dir;
  int resolution = 224;
  FovFallback fallback = FovFallback::error;
  bool export_maps = false;
};
// Per image: FoV preprocessing, both detectors, three stacked tensors.
// Writes <stem>_rgbls/_rgbts/_rgblsts.rstk and preprocess_log.csv.
// Exit code 0 iff every image succeeded.
int cmd_preprocess(const PreprocessOptions& options);

struct SynthOptions {
  int n_per_class = 100;
  std::uint64_t seed = 7;
  std::filesystem::path out_dir;
};
// 3n PPM images under images/, ground truth in gt.jsonl, manifest.csv with a
// per-class 80/20 train/test split.
int cmd_synth(const SynthOptions& options);

struct TrainOptions {
  std::filesystem::path manifest;
  std::filesystem::path stack_dir;
  std::filesystem::path out_dir;
  std::string arch = "dual";  // "single" or "dual"
  std::vector<int> widths = {8, 16, 32};
  nn::TrainConfig config;
};
// Trains on the manifest's train split, validates on its test split; writes
// model.siqa and loss_curve.csv.
int cmd_train(const TrainOptions& options);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path manifest;
  std::filesystem::path stack_dir;
  std::filesystem::path out_dir;
  std::string split = "test";
};
// Predicts over the chosen split and writes predictions.csv plus the full
// report (metrics, confusion matrix, |M_TS| CDFs).
int cmd_eval(const EvalOptions& options);

struct ExplainOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path image;
  std::filesystem::path out_dir;
  int target_class = -1;  // -1: use the predicted class
  int resolution = 224;
  FovFallback fallback = FovFallback::error;
};
// Grad-CAM heatmap(s) as PGM plus 50/50 overlay PPM(s); the dual model
// yields one pair per branch.
int cmd_explain(const ExplainOptions& options);

struct StatsOptions {
  std::filesystem::path manifest;
  std::filesystem::path log;  // preprocess_log.csv
  std::filesystem::path out_dir;
};
// Joins preprocess_log.csv with manifest labels and renders per-class
// |M_TS| cumulative distributions plus reference CDF points.
int cmd_stats(const StatsOptions& options);

}  // namespace siqa::cli
