#include <algorithm>
#include <array>
#include <cmath>

#include "siqa/errors.hpp"
#include "siqa/saliency.hpp"

namespace siqa {

std::vector<std::pair<int, int>> line_offsets(int scale, int angle_index) {
  const double theta = angle_index * kLineAngleStepDeg * M_PI / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<std::pair<int, int>> offsets;
  const int half = (scale - 1) / 2;
  for (int t = -half; t <= half; ++t) {
    const int dx = static_cast<int>(std::lround(t * c));
    const int dy = static_cast<int>(std::lround(t * s));
    offsets.emplace_back(dx, dy);
  }
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  return offsets;
}

namespace {

// Summed-area table; sums are over [0..x] x [0..y] inclusive.
struct Integral {
  int width = 0, height = 0;
  std::vector<double> table;

  explicit Integral(const RasterImage& img) {
    width = img.width;
    height = img.height;
    table.assign(static_cast<std::size_t>(width) * height, 0.0);
    for (int y = 0; y < height; ++y) {
      double row = 0.0;
      for (int x = 0; x < width; ++x) {
        row += img.at(x, y, 0);
        table[static_cast<std::size_t>(y) * width + x] =
            row + (y > 0 ? table[static_cast<std::size_t>(y - 1) * width + x]
                         : 0.0);
      }
    }
  }

  // Sum over the clipped rectangle [x0, x1] x [y0, y1].
  double sum(int x0, int y0, int x1, int y1) const {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, width - 1);
    y1 = std::min(y1, height - 1);
    auto at = [&](int x, int y) -> double {
      if (x < 0 || y < 0) return 0.0;
      return table[static_cast<std::size_t>(y) * width + x];
    };
    return at(x1, y1) - at(x0 - 1, y1) - at(x1, y0 - 1) + at(x0 - 1, y0 - 1);
  }
};

}  // namespace

LineResponseMap line_response(const RasterImage& inv_gray, const FovMask& fov) {
  if (inv_gray.channels != 1) {
    throw WrongChannelCount("line_response expects a single channel");
  }
  if (inv_gray.width != fov.width || inv_gray.height != fov.height) {
    throw DimensionMismatch("line_response: size mismatch");
  }
  const int w = inv_gray.width, h = inv_gray.height;

  // Offset sets per scale and orientation, built once.
  std::array<std::array<std::vector<std::pair<int, int>>, kLineAngleCount>, 4>
      offsets;
  for (int si = 0; si < 4; ++si) {
    for (int ai = 0; ai < kLineAngleCount; ++ai) {
      offsets[si][ai] = line_offsets(kLineScales[si], ai);
    }
  }

  const Integral integral(inv_gray);

  LineResponseMap out;
  out.width = w;
  out.height = h;
  out.data.assign(static_cast<std::size_t>(w) * h, 0.0);
  out.stage = LineStage::raw;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!fov.at(x, y)) continue;
      double acc = 0.0;
      for (int si = 0; si < 4; ++si) {
        const int s = kLineScales[si];
        if (s == 1) continue;  // line equals window; response is 0
        const int half = (s - 1) / 2;
        const double win_sum =
            integral.sum(x - half, y - half, x + half, y + half);
        const int win_count = (std::min(x + half, w - 1) -
                               std::max(x - half, 0) + 1) *
                              (std::min(y + half, h - 1) -
                               std::max(y - half, 0) + 1);
        const double win_avg = win_sum / win_count;

        double best = -1e300;
        for (int ai = 0; ai < kLineAngleCount; ++ai) {
          double line_sum = 0.0;
          int line_count = 0;
          for (const auto& [dx, dy] : offsets[si][ai]) {
            const int xx = x + dx, yy = y + dy;
            if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
            line_sum += inv_gray.at(xx, yy, 0);
            ++line_count;
          }
          const double line_avg = line_sum / line_count;
          best = std::max(best, line_avg - win_avg);
        }
        acc += best;
      }
      out.data[static_cast<std::size_t>(y) * w + x] = acc / 4.0;
    }
  }
  return out;
}

LineResponseMap enhance_line_response(const LineResponseMap& raw,
                                      const RasterImage& inv_gray) {
  if (raw.stage != LineStage::raw) {
    throw StageMismatch("enhance_line_response expects the raw stage");
  }
  if (raw.width != inv_gray.width || raw.height != inv_gray.height) {
    throw DimensionMismatch("enhance_line_response: size mismatch");
  }
  LineResponseMap out;
  out.width = raw.width;
  out.height = raw.height;
  out.stage = LineStage::enhanced;
  out.data.resize(raw.data.size());
  for (std::size_t i = 0; i < raw.data.size(); ++i) {
    out.data[i] = (4.0 * raw.data[i] + inv_gray.data[i]) / 5.0;
  }
  return out;
}

LineResponseMap zscore_standardize(const LineResponseMap& enhanced,
                                   const FovMask& fov) {
  if (enhanced.stage != LineStage::enhanced) {
    throw StageMismatch("zscore_standardize expects the enhanced stage");
  }
  if (enhanced.width != fov.width || enhanced.height != fov.height) {
    throw DimensionMismatch("zscore_standardize: size mismatch");
  }
  const std::size_t n = fov.count();
  if (n == 0) throw EmptyFov("zscore_standardize: empty FoV");

  double mean = 0.0;
  for (int y = 0; y < enhanced.height; ++y) {
    for (int x = 0; x < enhanced.width; ++x) {
      if (fov.at(x, y)) mean += enhanced.at(x, y);
    }
  }
  mean /= static_cast<double>(n);

  double var = 0.0;
  for (int y = 0; y < enhanced.height; ++y) {
    for (int x = 0; x < enhanced.width; ++x) {
      if (!fov.at(x, y)) continue;
      const double d = enhanced.at(x, y) - mean;
      var += d * d;
    }
  }
  const double sigma = std::sqrt(var / static_cast<double>(n));

  LineResponseMap out;
  out.width = enhanced.width;
  out.height = enhanced.height;
  out.stage = LineStage::standardized;
  out.data.assign(enhanced.data.size(), 0.0);
  if (sigma < 1e-12) return out;  // constant input

  double min_value = 1e300;
  for (int y = 0; y < enhanced.height; ++y) {
    for (int x = 0; x < enhanced.width; ++x) {
      if (!fov.at(x, y)) continue;
      const double v = (enhanced.at(x, y) - mean) / sigma;
      out.data[static_cast<std::size_t>(y) * out.width + x] = v;
      min_value = std::min(min_value, v);
    }
  }
  // Outside-FoV pixels sit at the minimum so they can never pass the
  // threshold.
  for (int y = 0; y < enhanced.height; ++y) {
    for (int x = 0; x < enhanced.width; ++x) {
      if (!fov.at(x, y)) {
        out.data[static_cast<std::size_t>(y) * out.width + x] = min_value;
      }
    }
  }
  return out;
}

BinaryMask threshold_tiny(const LineResponseMap& standardized,
                          const FovMask& fov) {
  if (standardized.stage != LineStage::standardized) {
    throw StageMismatch("threshold_tiny expects the standardized stage");
  }
  if (standardized.width != fov.width || standardized.height != fov.height) {
    throw DimensionMismatch("threshold_tiny: size mismatch");
  }
  BinaryMask mask = BinaryMask::empty(standardized.width, standardized.height);
  for (int y = 0; y < standardized.height; ++y) {
    for (int x = 0; x < standardized.width; ++x) {
      mask.set(x, y, fov.at(x, y) && standardized.at(x, y) >= kTinyThreshold);
    }
  }
  return mask;
}

TinyStructures detect_tiny(const RasterImage& rgb, const FovMask& fov) {
  RasterImage inv = to_gray(rgb);
  for (double& v : inv.data) v = 1.0 - v;
  const LineResponseMap raw = line_response(inv, fov);
  const LineResponseMap enhanced = enhance_line_response(raw, inv);
  LineResponseMap standardized = zscore_standardize(enhanced, fov);
  BinaryMask mask = threshold_tiny(standardized, fov);
  return {std::move(standardized), std::move(mask)};
}

}  // namespace siqa
