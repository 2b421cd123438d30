#pragma once

#include <cstdint>
#include <vector>

#include "siqa/raster.hpp"

namespace siqa {

// Detected circular field of view.
struct FovCircle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;
};

// Boolean mask of fundus pixels, aligned with a (possibly preprocessed) image.
struct FovMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  static FovMask full(int w, int h) {
    FovMask m;
    m.width = w;
    m.height = h;
    m.data.assign(static_cast<std::size_t>(w) * h, 1);
    return m;
  }
  static FovMask empty(int w, int h) {
    FovMask m = full(w, h);
    std::fill(m.data.begin(), m.data.end(), 0);
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

// Circle Hough transform over Sobel edges. Radii are swept over
// [0.30, 0.50] * min(W, H) in 2-pixel steps; the peak cell is refined by the
// centroid of cells within 5% of the peak. Throws NoFovFound when the best
// circle is supported by edge pixels on less than 25% of its circumference.
FovCircle detect_fov(const RasterImage& gray);

// Crop to the circle's bounding box and zero-pad to a square of side
// 2*ceil(r), keeping the circle centered.
RasterImage crop_pad_square(const RasterImage& img, const FovCircle& c);

struct Preprocessed {
  RasterImage image;  // target x target x 3, zero outside the FoV
  FovMask mask;
  FovCircle circle;  // in source image coordinates
};

// detect_fov + crop_pad_square + bilinear rescale; the mask goes through the
// identical geometry with nearest-neighbor resampling.
Preprocessed preprocess(const RasterImage& rgb, int target = 224);
Preprocessed preprocess_with_circle(const RasterImage& rgb,
                                    const FovCircle& circle, int target);

// Fallback circle used by `--fov-fallback=full-frame`: centered, radius
// min(W, H) / 2.
FovCircle full_frame_circle(int width, int height);

}  // namespace siqa
