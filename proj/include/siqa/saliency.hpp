#pragma once

#include <cstdint>
#include <vector>

#include "siqa/fov.hpp"
#include "siqa/raster.hpp"

namespace siqa {

// Probability map in [0, 1]; unless identically zero its maximum is 1.
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  double at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

// Binary structure mask; false everywhere outside the FoV.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  static BinaryMask empty(int w, int h) {
    BinaryMask m;
    m.width = w;
    m.height = h;
    m.data.assign(static_cast<std::size_t>(w) * h, 0);
    return m;
  }
  bool at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t count() const;
};

// ---------------------------------------------------------------------------
// Large-size salient structures (optic disc, large exudates).
// ---------------------------------------------------------------------------

// Per-pixel Euclidean distance between the FoV-mean Lab vector and the 5x5
// Gaussian-smoothed Lab image; zero outside the FoV.
Grid contrast_map(const LabImage& lab, const FovMask& fov);

// Division by the global maximum; an all-zero map stays all-zero.
SaliencyMap normalize_max(const Grid& m);

// Adaptive binarization at tau = min(1, 2 * mean over FoV).
BinaryMask threshold_large(const SaliencyMap& p, const FovMask& fov);

struct LargeStructures {
  SaliencyMap probability;
  BinaryMask mask;
};
LargeStructures detect_large(const RasterImage& rgb, const FovMask& fov);

// ---------------------------------------------------------------------------
// Tiny-size salient structures (vessels) via the multi-scale line detector.
// ---------------------------------------------------------------------------

enum class LineStage { raw, enhanced, standardized };

struct LineResponseMap {
  int width = 0;
  int height = 0;
  std::vector<double> data;
  LineStage stage = LineStage::raw;

  double at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

inline constexpr double kTinyThreshold = 0.56;
inline constexpr int kLineScales[] = {1, 3, 5, 7};
inline constexpr int kLineAngleStepDeg = 15;
inline constexpr int kLineAngleCount = 12;  // 0..165 degrees

// Mean over scales of the best oriented line average minus the window
// average, evaluated on the inverted gray channel. Zero outside the FoV.
LineResponseMap line_response(const RasterImage& inv_gray, const FovMask& fov);

// (|S| * raw + inv_gray) / (|S| + 1).
LineResponseMap enhance_line_response(const LineResponseMap& raw,
                                      const RasterImage& inv_gray);

// Z-score standardization with population statistics over FoV pixels;
// outside-FoV pixels take the minimum standardized value.
LineResponseMap zscore_standardize(const LineResponseMap& enhanced,
                                   const FovMask& fov);

// std >= 0.56 inside the FoV.
BinaryMask threshold_tiny(const LineResponseMap& standardized,
                          const FovMask& fov);

struct TinyStructures {
  LineResponseMap response;  // standardized
  BinaryMask mask;
};
TinyStructures detect_tiny(const RasterImage& rgb, const FovMask& fov);

// The oriented line offsets used by line_response: rounded t*(cos, sin) for
// t in {-(s-1)/2 .. (s-1)/2}, deduplicated. Exposed for tests.
std::vector<std::pair<int, int>> line_offsets(int scale, int angle_index);

}  // namespace siqa
