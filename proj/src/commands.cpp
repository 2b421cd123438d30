#include "siqa/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "siqa/errors.hpp"
#include "siqa/eval.hpp"
#include "siqa/netpbm.hpp"
#include "siqa/nn/grad_cam.hpp"
#include "siqa/report.hpp"
#include "siqa/rng.hpp"
#include "siqa/saliency.hpp"

namespace siqa::cli {

namespace {

namespace fs = std::filesystem;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw IoFailure("cannot create directory " + dir.string());
  }
}

RasterImage to_rgb(RasterImage img) {
  if (img.channels == 3) return img;
  RasterImage rgb = RasterImage::zeros(img.width, img.height, 3);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    rgb.data[i * 3 + 0] = rgb.data[i * 3 + 1] = rgb.data[i * 3 + 2] =
        img.data[i];
  }
  return rgb;
}

std::int64_t ts_plane_sum(const ChannelStack& stack) {
  const int plane = stack.order == StackOrder::rgb_ls_ts ? 4 : 3;
  std::int64_t sum = 0;
  const float* p = stack.plane(plane);
  for (std::size_t i = 0; i < stack.plane_size(); ++i) {
    if (p[i] != 0.0f) ++sum;
  }
  return sum;
}

// Grid remapped [min,max] -> [0,255] as PGM bytes.
std::vector<std::uint8_t> encode_pgm_affine(const Grid& map) {
  const auto [lo_it, hi_it] =
      std::minmax_element(map.data.begin(), map.data.end());
  const double lo = *lo_it, hi = *hi_it;
  Grid remapped = map;
  if (hi > lo) {
    for (double& v : remapped.data) v = (v - lo) / (hi - lo);
  } else {
    std::fill(remapped.data.begin(), remapped.data.end(), 0.0);
  }
  return encode_pgm(remapped);
}

std::vector<std::uint8_t> encode_mask_pgm(const BinaryMask& mask) {
  Grid g = Grid::zeros(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    g.data[i] = mask.data[i] ? 1.0 : 0.0;
  }
  return encode_pgm(g);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::vector<SampleRecord> read_manifest_file(const fs::path& path) {
  const auto bytes = read_file(path);
  return load_manifest(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

nn::Architecture parse_arch(const std::string& name) {
  if (name == "single") return nn::Architecture::single;
  if (name == "dual") return nn::Architecture::dual;
  throw Error("unknown architecture: " + name);
}

// Loads the branch stacks for one manifest record.
std::vector<ChannelStack> load_branch_stacks(const fs::path& stack_dir,
                                             const SampleRecord& record,
                                             nn::Architecture arch) {
  std::vector<ChannelStack> stacks;
  if (arch == nn::Architecture::single) {
    stacks.push_back(
        load_stack(stack_path(stack_dir, record.image_path, StackOrder::rgb_ls_ts)));
  } else {
    stacks.push_back(
        load_stack(stack_path(stack_dir, record.image_path, StackOrder::rgb_ls)));
    stacks.push_back(
        load_stack(stack_path(stack_dir, record.image_path, StackOrder::rgb_ts)));
  }
  return stacks;
}

}  // namespace

FovFallback parse_fallback(const std::string& name) {
  if (name == "error") return FovFallback::error;
  if (name == "full-frame") return FovFallback::full_frame;
  throw Error("unknown --fov-fallback value: " + name);
}

fs::path stack_path(const fs::path& stack_dir, const fs::path& image_path,
                    StackOrder order) {
  static constexpr const char* kSuffix[3] = {"_rgbls.rstk", "_rgbts.rstk",
                                             "_rgblsts.rstk"};
  return stack_dir /
         (image_path.stem().string() + kSuffix[static_cast<int>(order)]);
}

int cmd_preprocess(const PreprocessOptions& options) {
  ensure_dir(options.out_dir);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(options.in_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".ppm" || ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::string log = "image,status,cx,cy,r,mls,mts\n";
  bool any_failure = false;
  for (const fs::path& file : files) {
    const std::string name = file.filename().string();
    try {
      const RasterImage rgb = to_rgb(load_image(file));
      Preprocessed pre;
      std::string status = "ok";
      try {
        pre = preprocess(rgb, options.resolution);
      } catch (const NoFovFound&) {
        if (options.fallback == FovFallback::error) throw;
        pre = preprocess_with_circle(
            rgb, full_frame_circle(rgb.width, rgb.height), options.resolution);
        status = "full_frame";
      }

      const LargeStructures large = detect_large(pre.image, pre.mask);
      const TinyStructures tiny = detect_tiny(pre.image, pre.mask);

      save_stack(
          stack_channels(pre.image, &large.mask, nullptr, StackOrder::rgb_ls),
          stack_path(options.out_dir, file, StackOrder::rgb_ls));
      save_stack(
          stack_channels(pre.image, nullptr, &tiny.mask, StackOrder::rgb_ts),
          stack_path(options.out_dir, file, StackOrder::rgb_ts));
      save_stack(stack_channels(pre.image, &large.mask, &tiny.mask,
                                StackOrder::rgb_ls_ts),
                 stack_path(options.out_dir, file, StackOrder::rgb_ls_ts));

      if (options.export_maps) {
        const std::string stem = file.stem().string();
        Grid pls = Grid::zeros(large.probability.width, large.probability.height);
        pls.data = large.probability.data;
        write_file(options.out_dir / (stem + "_pls.pgm"),
                   std::span<const std::uint8_t>(encode_pgm(pls)));
        write_file(options.out_dir / (stem + "_mls.pgm"),
                   std::span<const std::uint8_t>(encode_mask_pgm(large.mask)));
        Grid rts = Grid::zeros(tiny.response.width, tiny.response.height);
        rts.data = tiny.response.data;
        write_file(options.out_dir / (stem + "_rts.pgm"),
                   std::span<const std::uint8_t>(encode_pgm_affine(rts)));
        write_file(options.out_dir / (stem + "_mts.pgm"),
                   std::span<const std::uint8_t>(encode_mask_pgm(tiny.mask)));
      }

      log += name + "," + status + "," + fmt_double(pre.circle.cx) + "," +
             fmt_double(pre.circle.cy) + "," + fmt_double(pre.circle.r) + "," +
             std::to_string(large.mask.count()) + "," +
             std::to_string(tiny.mask.count()) + "\n";
    } catch (const NoFovFound&) {
      log += name + ",no_fov,,,,,\n";
      any_failure = true;
    } catch (const Error& e) {
      log += name + ",error,,,,,\n";
      std::fprintf(stderr, "preprocess: %s: %s\n", name.c_str(), e.what());
      any_failure = true;
    }
  }
  write_file(options.out_dir / "preprocess_log.csv", log);
  return any_failure ? 1 : 0;
}

int cmd_synth(const SynthOptions& options) {
  if (options.n_per_class < 1) throw Error("synth: n must be >= 1");
  ensure_dir(options.out_dir / "images");

  std::vector<SampleRecord> records;
  std::string jsonl;
  for (int cls = 0; cls < 3; ++cls) {
    const auto label = static_cast<QualityLabel>(cls);

    // Per-class 80/20 split, shuffled deterministically.
    const int n = options.n_per_class;
    std::vector<int> indices(n);
    for (int i = 0; i < n; ++i) indices[i] = i;
    Rng rng(mix(options.seed, 0x5b17 + cls));
    for (int i = n; i > 1; --i) {
      std::swap(indices[i - 1], indices[rng.uniform_int(i)]);
    }
    const int train_count = 4 * n / 5;
    std::vector<bool> is_train(n, false);
    for (int i = 0; i < train_count; ++i) is_train[indices[i]] = true;

    for (int i = 0; i < n; ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%04d.ppm", label_name(label), i);
      const std::string rel = std::string("images/") + name;
      const std::uint64_t sample_seed = options.seed + static_cast<std::uint64_t>(i);
      const SyntheticSample sample = generate_synthetic(label, sample_seed);

      const auto ppm = encode_ppm(sample.image);
      write_file(options.out_dir / rel, std::span<const std::uint8_t>(ppm));

      nlohmann::ordered_json row;
      row["image"] = rel;
      row["label"] = cls;
      row["seed"] = sample_seed;
      row["fov"] = {{"cx", sample.truth.fov.cx},
                    {"cy", sample.truth.fov.cy},
                    {"r", sample.truth.fov.r}};
      row["disc"] = {{"cx", sample.truth.disc.cx},
                     {"cy", sample.truth.disc.cy},
                     {"r", sample.truth.disc.r}};
      row["vessel_count"] = sample.truth.vessel_pixels.size();
      auto& vessels = row["vessels"] = nlohmann::ordered_json::array();
      for (const auto& [x, y] : sample.truth.vessel_pixels) {
        vessels.push_back({x, y});
      }
      jsonl += row.dump() + "\n";

      records.push_back({rel, label, is_train[i] ? "train" : "test"});
    }
  }
  write_file(options.out_dir / "gt.jsonl", jsonl);
  write_file(options.out_dir / "manifest.csv", manifest_to_csv(records));
  return 0;
}

int cmd_train(const TrainOptions& options) {
  ensure_dir(options.out_dir);
  const nn::Architecture arch = parse_arch(options.arch);

  nn::ModelConfig model_config;
  model_config.widths = options.widths;
  model_config.input_channels = arch == nn::Architecture::dual ? 4 : 5;

  std::vector<nn::Example> train_set, val_set;
  for (const SampleRecord& record : read_manifest_file(options.manifest)) {
    nn::Example ex;
    ex.inputs = load_branch_stacks(options.stack_dir, record, arch);
    ex.label = static_cast<int>(record.label);
    (record.split == "train" ? train_set : val_set).push_back(std::move(ex));
  }

  const nn::TrainResult result =
      nn::train(arch, model_config, train_set, val_set, options.config);

  nn::save_model(result.model, options.out_dir / "model.siqa");
  std::string curve = "epoch,train_loss,val_accuracy,lr\n";
  for (const nn::EpochStats& row : result.curve) {
    curve += std::to_string(row.epoch) + "," + fmt_double(row.train_loss) +
             "," + fmt_double(row.val_accuracy) + "," + fmt_double(row.lr) +
             "\n";
  }
  write_file(options.out_dir / "loss_curve.csv", curve);
  std::printf("trained %s model: best epoch %d, val accuracy %s\n",
              options.arch.c_str(), result.best_epoch,
              fmt_double(result.curve[result.best_epoch - 1].val_accuracy).c_str());
  return 0;
}

int cmd_eval(const EvalOptions& options) {
  ensure_dir(options.out_dir);
  const nn::Model model = nn::load_model(options.checkpoint);

  std::vector<int> preds, truths;
  std::array<std::vector<std::int64_t>, 3> mts_sizes;
  std::string predictions = "image,truth,pred,p_good,p_usable,p_reject\n";
  for (const SampleRecord& record : read_manifest_file(options.manifest)) {
    if (record.split != options.split) continue;
    const auto stacks = load_branch_stacks(options.stack_dir, record, model.arch);
    std::vector<nn::Tensor4> inputs;
    for (const ChannelStack& s : stacks) inputs.push_back(nn::stack_to_tensor(s));
    const nn::Prediction pred = nn::predict(model, inputs);

    const int truth = static_cast<int>(record.label);
    preds.push_back(pred.label);
    truths.push_back(truth);
    mts_sizes[truth].push_back(ts_plane_sum(stacks.back()));
    predictions += record.image_path + "," + std::to_string(truth) + "," +
                   std::to_string(pred.label) + "," + fmt_double(pred.probs[0]) +
                   "," + fmt_double(pred.probs[1]) + "," +
                   fmt_double(pred.probs[2]) + "\n";
  }
  if (preds.empty()) throw EmptyInput("eval: no samples in split " + options.split);

  const ConfusionMatrix cm = confusion(preds, truths);
  render_report(metrics(cm), cm, mts_sizes, options.out_dir);
  write_file(options.out_dir / "predictions.csv", predictions);
  std::printf("evaluated %zu samples: accuracy %s\n", preds.size(),
              fmt_double(metrics(cm).acc).c_str());
  return 0;
}

int cmd_explain(const ExplainOptions& options) {
  ensure_dir(options.out_dir);
  const nn::Model model = nn::load_model(options.checkpoint);
  const int stride = 1 << model.config.blocks();
  if (options.resolution % stride != 0) {
    throw Error("explain: resolution must be divisible by " +
                std::to_string(stride));
  }

  const RasterImage rgb = to_rgb(load_image(options.image));
  Preprocessed pre;
  try {
    pre = preprocess(rgb, options.resolution);
  } catch (const NoFovFound&) {
    if (options.fallback == FovFallback::error) throw;
    pre = preprocess_with_circle(rgb, full_frame_circle(rgb.width, rgb.height),
                                 options.resolution);
  }
  const LargeStructures large = detect_large(pre.image, pre.mask);
  const TinyStructures tiny = detect_tiny(pre.image, pre.mask);

  std::vector<nn::Tensor4> inputs;
  if (model.arch == nn::Architecture::single) {
    inputs.push_back(nn::stack_to_tensor(stack_channels(
        pre.image, &large.mask, &tiny.mask, StackOrder::rgb_ls_ts)));
  } else {
    inputs.push_back(nn::stack_to_tensor(
        stack_channels(pre.image, &large.mask, nullptr, StackOrder::rgb_ls)));
    inputs.push_back(nn::stack_to_tensor(
        stack_channels(pre.image, nullptr, &tiny.mask, StackOrder::rgb_ts)));
  }

  const nn::Prediction pred = nn::predict(model, inputs);
  const int target = options.target_class >= 0 ? options.target_class : pred.label;
  const std::vector<Grid> maps = nn::grad_cam(model, inputs, target);

  auto overlay = [&](const Grid& heat) {
    RasterImage out = RasterImage::zeros(heat.width, heat.height, 3);
    for (int y = 0; y < heat.height; ++y) {
      for (int x = 0; x < heat.width; ++x) {
        const double v = heat.at(x, y);
        const double hot[3] = {std::clamp(3.0 * v, 0.0, 1.0),
                               std::clamp(3.0 * v - 1.0, 0.0, 1.0),
                               std::clamp(3.0 * v - 2.0, 0.0, 1.0)};
        for (int c = 0; c < 3; ++c) {
          out.at(x, y, c) = 0.5 * pre.image.at(x, y, c) + 0.5 * hot[c];
        }
      }
    }
    return out;
  };

  const bool dual = model.arch == nn::Architecture::dual;
  for (std::size_t b = 0; b < maps.size(); ++b) {
    const std::string tag = dual ? (b == 0 ? "_ls" : "_ts") : "";
    write_file(options.out_dir / ("heatmap" + tag + ".pgm"),
               std::span<const std::uint8_t>(encode_pgm(maps[b])));
    write_file(options.out_dir / ("overlay" + tag + ".ppm"),
               std::span<const std::uint8_t>(encode_ppm(overlay(maps[b]))));
  }
  std::printf("predicted class %d (%s); explained class %d\n", pred.label,
              label_name(static_cast<QualityLabel>(pred.label)), target);
  return 0;
}

int cmd_stats(const StatsOptions& options) {
  ensure_dir(options.out_dir);

  std::map<std::string, QualityLabel> labels;
  for (const SampleRecord& record : read_manifest_file(options.manifest)) {
    labels[fs::path(record.image_path).filename().string()] = record.label;
  }

  const auto bytes = read_file(options.log);
  const std::string text(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size());
  std::array<std::vector<std::int64_t>, 3> sizes;
  std::size_t start = 0;
  bool header = true;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto fields = split_line(line);
    if (fields.size() != 7 || fields[1] == "no_fov" || fields[1] == "error") {
      continue;
    }
    const auto it = labels.find(fields[0]);
    if (it == labels.end()) continue;
    sizes[static_cast<int>(it->second)].push_back(std::stoll(fields[6]));
  }

  render_cdf(sizes, options.out_dir);

  // Reference CDF points used in the quality-separation analysis.
  std::vector<std::pair<std::int64_t, int>> flat;
  for (int k = 0; k < 3; ++k) {
    for (std::int64_t s : sizes[k]) flat.emplace_back(s, k);
  }
  std::string summary = "class,count,cdf_1513,cdf_2160,q70\n";
  if (!flat.empty()) {
    const MtsCdf cdf(flat);
    const char* names[3] = {"good", "usable", "reject"};
    for (int k = 0; k < 3; ++k) {
      if (sizes[k].empty()) continue;
      summary += std::string(names[k]) + "," + std::to_string(sizes[k].size()) +
                 "," + fmt_double(cdf.cdf(k, 1513)) + "," +
                 fmt_double(cdf.cdf(k, 2160)) + "," +
                 std::to_string(cdf.quantile(k, 0.7)) + "\n";
    }
  }
  write_file(options.out_dir / "mts_stats.csv", summary);
  return 0;
}

}  // namespace siqa::cli
