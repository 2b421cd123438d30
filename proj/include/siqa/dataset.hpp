#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "siqa/fov.hpp"
#include "siqa/raster.hpp"
#include "siqa/saliency.hpp"

namespace siqa {

enum class QualityLabel : int { good = 0, usable = 1, reject = 2 };

inline const char* label_name(QualityLabel l) {
  switch (l) {
    case QualityLabel::good:
      return "good";
    case QualityLabel::usable:
      return "usable";
    default:
      return "reject";
  }
}

struct SampleRecord {
  std::string image_path;
  QualityLabel label = QualityLabel::good;
  std::string split;  // "train" or "test"
};

// CSV with header `image,quality,split`; quality in {0,1,2}.
std::vector<SampleRecord> load_manifest(std::string_view csv);
std::string manifest_to_csv(const std::vector<SampleRecord>& records);

enum class StackOrder : std::uint8_t {
  rgb_ls = 0,
  rgb_ts = 1,
  rgb_ls_ts = 2,
};

inline int stack_channel_count(StackOrder order) {
  return order == StackOrder::rgb_ls_ts ? 5 : 4;
}

// Channel-planar tensor fed to the classifier: [R,G,B,(M_LS),(M_TS)].
struct ChannelStack {
  int width = 0;
  int height = 0;
  int channels = 0;
  StackOrder order = StackOrder::rgb_ls;
  std::vector<float> data;  // planar, width*height per channel

  std::size_t plane_size() const {
    return static_cast<std::size_t>(width) * height;
  }
  float* plane(int c) { return data.data() + plane_size() * c; }
  const float* plane(int c) const { return data.data() + plane_size() * c; }
};

ChannelStack stack_channels(const RasterImage& img, const BinaryMask* ls,
                            const BinaryMask* ts, StackOrder order);

// Geometric augmentation: coin-flip horizontal and vertical flips, then a
// rotation uniform in +-rotation_range_deg. RGB channels resample bilinearly,
// mask channels nearest; every channel sees the identical transform.
ChannelStack augment(const ChannelStack& stack, std::uint64_t seed,
                     double rotation_range_deg = 30.0);

// --- RSTK container ---------------------------------------------------------

std::vector<std::uint8_t> encode_stack(const ChannelStack& stack);
ChannelStack decode_stack(std::span<const std::uint8_t> bytes);
void save_stack(const ChannelStack& stack, const std::filesystem::path& path);
ChannelStack load_stack(const std::filesystem::path& path);

// --- Synthetic three-class corpus -------------------------------------------

struct SyntheticTruth {
  FovCircle fov;
  FovCircle disc;
  std::vector<std::pair<std::int16_t, std::int16_t>> vessel_pixels;
};

struct SyntheticSample {
  RasterImage image;
  SyntheticTruth truth;
};

inline constexpr int kSyntheticSize = 224;

// Deterministic fundus-like image. The drawn content (disc, vessel tree,
// colors) depends only on the seed, so the three grades of one seed are
// degradations of the same scene: Usable adds a mild linear illumination
// ramp, Reject is heavily blurred with a strong localized gradient and an
// occluding bright blob.
SyntheticSample generate_synthetic(QualityLabel grade, std::uint64_t seed);

// FoV mask matching the generator's circle, for running detectors on
// generated images without going through Hough detection.
FovMask synthetic_fov_mask();

}  // namespace siqa
