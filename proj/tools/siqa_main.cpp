#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "siqa/commands.hpp"
#include "siqa/errors.hpp"

using siqa::cli::FovFallback;

int main(int argc, char** argv) {
  CLI::App app{"Retinal image quality assessment with salient structure priors"};
  app.require_subcommand(1);
  app.set_config("--config");

  std::uint64_t seed = 7;
  int resolution = 224;
  app.add_option("--seed", seed, "Global RNG seed")->capture_default_str();
  app.add_option("--resolution", resolution, "Preprocessing resolution")
      ->capture_default_str();

  siqa::cli::PreprocessOptions pre;
  std::string pre_fallback = "error";
  auto* cmd_pre = app.add_subcommand(
      "preprocess", "Detect FoV, crop/rescale, run both detectors, save stacks");
  cmd_pre->add_option("--in", pre.in_dir, "Directory of .ppm/.pgm images")
      ->required();
  cmd_pre->add_option("--out", pre.out_dir, "Output directory")->required();
  cmd_pre->add_option("--fov-fallback", pre_fallback,
                      "Policy when no FoV is found: error|full-frame")
      ->capture_default_str();
  cmd_pre->add_flag("--export-maps", pre.export_maps,
                    "Also export P_LS/M_LS/R''_line/M_TS as PGM");

  siqa::cli::SynthOptions synth;
  auto* cmd_synth = app.add_subcommand(
      "synth", "Generate the synthetic three-class corpus with ground truth");
  cmd_synth->add_option("--n", synth.n_per_class, "Images per class")
      ->required();
  cmd_synth->add_option("--out", synth.out_dir, "Output directory")->required();

  siqa::cli::TrainOptions train;
  auto* cmd_train =
      app.add_subcommand("train", "Train a quality classifier on saved stacks");
  cmd_train->add_option("--manifest", train.manifest, "Manifest CSV")->required();
  cmd_train->add_option("--stacks", train.stack_dir, "Stack directory")
      ->required();
  cmd_train->add_option("--out", train.out_dir, "Output directory")->required();
  cmd_train->add_option("--arch", train.arch, "single|dual")
      ->capture_default_str();
  cmd_train->add_option("--epochs", train.config.epochs, "Training epochs")
      ->capture_default_str();
  cmd_train->add_option("--batch", train.config.batch_size, "Minibatch size")
      ->capture_default_str();
  cmd_train->add_option("--lr", train.config.lr_initial, "Initial learning rate")
      ->capture_default_str();
  cmd_train->add_option("--lr-reduced", train.config.lr_reduced,
                        "Learning rate after the drop epoch")
      ->capture_default_str();
  cmd_train->add_option("--lr-drop-epoch", train.config.lr_drop_epoch,
                        "First epoch trained at the reduced rate")
      ->capture_default_str();
  cmd_train->add_option("--widths", train.widths, "Backbone block widths")
      ->capture_default_str();
  cmd_train->add_flag("--augment", train.config.augment,
                      "Random flips and rotation on training samples");

  siqa::cli::EvalOptions eval;
  auto* cmd_eval =
      app.add_subcommand("eval", "Evaluate a checkpoint over a manifest split");
  cmd_eval->add_option("--checkpoint", eval.checkpoint, "Model file")->required();
  cmd_eval->add_option("--manifest", eval.manifest, "Manifest CSV")->required();
  cmd_eval->add_option("--stacks", eval.stack_dir, "Stack directory")->required();
  cmd_eval->add_option("--out", eval.out_dir, "Report directory")->required();
  cmd_eval->add_option("--split", eval.split, "Manifest split to evaluate")
      ->capture_default_str();

  siqa::cli::ExplainOptions explain;
  std::string explain_fallback = "error";
  auto* cmd_explain = app.add_subcommand(
      "explain", "Grad-CAM heatmaps for one image under a trained model");
  cmd_explain->add_option("--checkpoint", explain.checkpoint, "Model file")
      ->required();
  cmd_explain->add_option("--image", explain.image, "Input image")->required();
  cmd_explain->add_option("--out", explain.out_dir, "Output directory")
      ->required();
  cmd_explain->add_option("--class", explain.target_class,
                          "Target class (default: predicted)");
  cmd_explain->add_option("--fov-fallback", explain_fallback,
                          "Policy when no FoV is found: error|full-frame")
      ->capture_default_str();

  siqa::cli::StatsOptions stats;
  auto* cmd_stats = app.add_subcommand(
      "stats", "Per-class |M_TS| cumulative distributions from a preprocess log");
  cmd_stats->add_option("--manifest", stats.manifest, "Manifest CSV")->required();
  cmd_stats->add_option("--log", stats.log, "preprocess_log.csv")->required();
  cmd_stats->add_option("--out", stats.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_pre->parsed()) {
      pre.resolution = resolution;
      pre.fallback = siqa::cli::parse_fallback(pre_fallback);
      return siqa::cli::cmd_preprocess(pre);
    }
    if (cmd_synth->parsed()) {
      synth.seed = seed;
      return siqa::cli::cmd_synth(synth);
    }
    if (cmd_train->parsed()) {
      train.config.seed = seed;
      return siqa::cli::cmd_train(train);
    }
    if (cmd_eval->parsed()) {
      return siqa::cli::cmd_eval(eval);
    }
    if (cmd_explain->parsed()) {
      explain.resolution = resolution;
      explain.fallback = siqa::cli::parse_fallback(explain_fallback);
      return siqa::cli::cmd_explain(explain);
    }
    if (cmd_stats->parsed()) {
      return siqa::cli::cmd_stats(stats);
    }
  } catch (const siqa::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
