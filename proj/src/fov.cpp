#include "siqa/fov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "siqa/errors.hpp"

namespace siqa {

std::size_t FovMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
}

namespace {

struct EdgePixel {
  int x, y;
  double gx, gy;  // unit gradient
};

struct EdgeMap {
  std::vector<EdgePixel> pixels;
  std::vector<std::uint8_t> bitmap;  // per-pixel edge flag
  int width = 0, height = 0;
};

EdgeMap sobel_edges(const RasterImage& gray, double rel_threshold) {
  const int w = gray.width, h = gray.height;
  auto px = [&](int x, int y) {
    return gray.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1), 0);
  };
  std::vector<double> mag(static_cast<std::size_t>(w) * h);
  std::vector<double> gxv(mag.size()), gyv(mag.size());
  double max_mag = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1) -
                        px(x - 1, y - 1) - 2 * px(x - 1, y) - px(x - 1, y + 1);
      const double gy = px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1) -
                        px(x - 1, y - 1) - 2 * px(x, y - 1) - px(x + 1, y - 1);
      const double m = std::sqrt(gx * gx + gy * gy);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      mag[i] = m;
      gxv[i] = gx;
      gyv[i] = gy;
      max_mag = std::max(max_mag, m);
    }
  }

  EdgeMap edges;
  edges.width = w;
  edges.height = h;
  edges.bitmap.assign(mag.size(), 0);
  if (max_mag <= 0.0) return edges;
  const double threshold = rel_threshold * max_mag;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (mag[i] >= threshold) {
        edges.pixels.push_back({x, y, gxv[i] / mag[i], gyv[i] / mag[i]});
        edges.bitmap[i] = 1;
      }
    }
  }
  return edges;
}

// Fraction of 360 circumference samples that have an edge pixel within a
// 5x5 neighborhood.
double circle_support(const EdgeMap& edges, const FovCircle& c) {
  int supported = 0;
  constexpr int kSamples = 360;
  for (int k = 0; k < kSamples; ++k) {
    const double a = 2.0 * M_PI * k / kSamples;
    const int x = static_cast<int>(std::lround(c.cx + c.r * std::cos(a)));
    const int y = static_cast<int>(std::lround(c.cy + c.r * std::sin(a)));
    bool hit = false;
    for (int dy = -2; dy <= 2 && !hit; ++dy) {
      for (int dx = -2; dx <= 2 && !hit; ++dx) {
        const int xx = x + dx, yy = y + dy;
        if (xx < 0 || yy < 0 || xx >= edges.width || yy >= edges.height) continue;
        hit = edges.bitmap[static_cast<std::size_t>(yy) * edges.width + xx] != 0;
      }
    }
    if (hit) ++supported;
  }
  return static_cast<double>(supported) / kSamples;
}

}  // namespace

FovCircle detect_fov(const RasterImage& gray) {
  if (gray.channels != 1) throw WrongChannelCount("detect_fov expects gray");
  if (std::min(gray.width, gray.height) < 64) {
    throw NoFovFound("image too small for FoV detection");
  }

  const EdgeMap edges = sobel_edges(gray, 0.1);
  if (edges.pixels.empty()) throw NoFovFound("no edges");

  const int w = gray.width, h = gray.height;
  const int min_side = std::min(w, h);
  const int r_lo = static_cast<int>(std::lround(0.30 * min_side));
  const int r_hi = static_cast<int>(std::lround(0.50 * min_side));
  std::vector<int> radii;
  for (int r = r_lo; r <= r_hi; r += 2) radii.push_back(r);

  // Votes along the gradient direction, both ways, per radius.
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  std::vector<std::uint32_t> acc(plane * radii.size(), 0);
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    std::uint32_t* slice = acc.data() + ri * plane;
    for (const EdgePixel& e : edges.pixels) {
      for (int sign = -1; sign <= 1; sign += 2) {
        const int cx = static_cast<int>(std::lround(e.x + sign * r * e.gx));
        const int cy = static_cast<int>(std::lround(e.y + sign * r * e.gy));
        if (cx >= 0 && cy >= 0 && cx < w && cy < h) {
          ++slice[static_cast<std::size_t>(cy) * w + cx];
        }
      }
    }
  }

  const auto peak_it = std::max_element(acc.begin(), acc.end());
  const std::uint32_t peak = *peak_it;
  if (peak == 0) throw NoFovFound("empty accumulator");

  // Centroid of cells within 5% of the peak.
  const double cutoff = 0.95 * peak;
  double sum_w = 0.0, sum_x = 0.0, sum_y = 0.0, sum_r = 0.0;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const std::uint32_t* slice = acc.data() + ri * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      if (slice[i] >= cutoff) {
        const double v = slice[i];
        sum_w += v;
        sum_x += v * static_cast<double>(i % w);
        sum_y += v * static_cast<double>(i / w);
        sum_r += v * radii[ri];
      }
    }
  }
  FovCircle circle{sum_x / sum_w, sum_y / sum_w, sum_r / sum_w};

  if (circle_support(edges, circle) < 0.25) {
    throw NoFovFound("insufficient circumference support");
  }
  return circle;
}

RasterImage crop_pad_square(const RasterImage& img, const FovCircle& c) {
  const int side = 2 * static_cast<int>(std::ceil(c.r));
  const int x0 = static_cast<int>(std::lround(c.cx)) - side / 2;
  const int y0 = static_cast<int>(std::lround(c.cy)) - side / 2;
  RasterImage out = RasterImage::zeros(side, side, img.channels);
  for (int y = 0; y < side; ++y) {
    const int sy = y0 + y;
    if (sy < 0 || sy >= img.height) continue;
    for (int x = 0; x < side; ++x) {
      const int sx = x0 + x;
      if (sx < 0 || sx >= img.width) continue;
      for (int ch = 0; ch < img.channels; ++ch) {
        out.at(x, y, ch) = img.at(sx, sy, ch);
      }
    }
  }
  return out;
}

FovCircle full_frame_circle(int width, int height) {
  return {(width - 1) / 2.0, (height - 1) / 2.0,
          std::min(width, height) / 2.0};
}

Preprocessed preprocess_with_circle(const RasterImage& rgb,
                                    const FovCircle& circle, int target) {
  RasterImage cropped = crop_pad_square(rgb, circle);
  RasterImage resized = resize_bilinear(cropped, target, target);

  // The mask rides through the identical geometry, nearest-neighbor.
  RasterImage mask_src = RasterImage::zeros(rgb.width, rgb.height, 1);
  const double r2 = circle.r * circle.r;
  for (int y = 0; y < rgb.height; ++y) {
    for (int x = 0; x < rgb.width; ++x) {
      const double dx = x - circle.cx, dy = y - circle.cy;
      if (dx * dx + dy * dy <= r2) mask_src.at(x, y, 0) = 1.0;
    }
  }
  RasterImage mask_cropped = crop_pad_square(mask_src, circle);
  Grid mask_grid = resize_grid(extract_channel(mask_cropped, 0), target, target,
                               Interp::nearest);

  FovMask mask = FovMask::empty(target, target);
  for (int y = 0; y < target; ++y) {
    for (int x = 0; x < target; ++x) {
      mask.set(x, y, mask_grid.at(x, y) >= 0.5);
    }
  }

  // Everything outside the FoV is forced to exactly zero.
  for (int y = 0; y < target; ++y) {
    for (int x = 0; x < target; ++x) {
      if (!mask.at(x, y)) {
        for (int c = 0; c < resized.channels; ++c) resized.at(x, y, c) = 0.0;
      }
    }
  }
  return {std::move(resized), std::move(mask), circle};
}

Preprocessed preprocess(const RasterImage& rgb, int target) {
  const FovCircle circle = detect_fov(to_gray(rgb));
  return preprocess_with_circle(rgb, circle, target);
}

}  // namespace siqa
