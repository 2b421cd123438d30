#include "siqa/raster.hpp"

#include <algorithm>
#include <cmath>

#include "siqa/errors.hpp"

namespace siqa {

namespace {

void require_rgb(const RasterImage& img) {
  if (img.channels != 3) {
    throw WrongChannelCount("expected 3-channel image, got " +
                            std::to_string(img.channels));
  }
}

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta
             ? std::cbrt(t)
             : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

}  // namespace

RasterImage to_gray(const RasterImage& img) {
  require_rgb(img);
  RasterImage out = RasterImage::zeros(img.width, img.height, 1);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = &img.data[i * 3];
    out.data[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return out;
}

LabImage rgb_to_lab(const RasterImage& img) {
  require_rgb(img);
  // D65 reference white.
  constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;
  LabImage out = LabImage::zeros(img.width, img.height);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = srgb_to_linear(img.data[i * 3 + 0]);
    const double g = srgb_to_linear(img.data[i * 3 + 1]);
    const double b = srgb_to_linear(img.data[i * 3 + 2]);
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double fx = lab_f(x / kXn);
    const double fy = lab_f(y / kYn);
    const double fz = lab_f(z / kZn);
    out.data[i * 3 + 0] = 116.0 * fy - 16.0;
    out.data[i * 3 + 1] = 500.0 * (fx - fy);
    out.data[i * 3 + 2] = 200.0 * (fy - fz);
  }
  return out;
}

Grid gaussian5(const Grid& src) {
  static constexpr double kKernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16,
                                        4.0 / 16, 1.0 / 16};
  const int w = src.width, h = src.height;
  Grid tmp = Grid::zeros(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) {
        const int xx = std::clamp(x + k, 0, w - 1);
        acc += kKernel[k + 2] * src.at(xx, y);
      }
      tmp.at(x, y) = acc;
    }
  }
  Grid out = Grid::zeros(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) {
        const int yy = std::clamp(y + k, 0, h - 1);
        acc += kKernel[k + 2] * tmp.at(x, yy);
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

namespace {

// Half-pixel center mapping with clamped source coordinates.
double src_coord(int dst, double scale, int src_size) {
  const double s = (dst + 0.5) * scale - 0.5;
  return std::clamp(s, 0.0, static_cast<double>(src_size - 1));
}

}  // namespace

RasterImage resize_bilinear(const RasterImage& img, int w, int h) {
  RasterImage out = RasterImage::zeros(w, h, img.channels);
  const double sx = static_cast<double>(img.width) / w;
  const double sy = static_cast<double>(img.height) / h;
  for (int y = 0; y < h; ++y) {
    const double fy = src_coord(y, sy, img.height);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < w; ++x) {
      const double fx = src_coord(x, sx, img.width);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < img.channels; ++c) {
        const double top = (1.0 - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
        const double bot = (1.0 - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
        out.at(x, y, c) = (1.0 - wy) * top + wy * bot;
      }
    }
  }
  return out;
}

Grid resize_grid(const Grid& src, int w, int h, Interp interp) {
  Grid out = Grid::zeros(w, h);
  const double sx = static_cast<double>(src.width) / w;
  const double sy = static_cast<double>(src.height) / h;
  for (int y = 0; y < h; ++y) {
    const double fy = src_coord(y, sy, src.height);
    for (int x = 0; x < w; ++x) {
      const double fx = src_coord(x, sx, src.width);
      if (interp == Interp::nearest) {
        out.at(x, y) = src.at(static_cast<int>(std::lround(fx)),
                              static_cast<int>(std::lround(fy)));
      } else {
        const int x0 = static_cast<int>(fx);
        const int x1 = std::min(x0 + 1, src.width - 1);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double wx = fx - x0, wy = fy - y0;
        const double top = (1.0 - wx) * src.at(x0, y0) + wx * src.at(x1, y0);
        const double bot = (1.0 - wx) * src.at(x0, y1) + wx * src.at(x1, y1);
        out.at(x, y) = (1.0 - wy) * top + wy * bot;
      }
    }
  }
  return out;
}

RasterImage flip_h(const RasterImage& img) {
  RasterImage out = RasterImage::zeros(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        out.at(x, y, c) = img.at(img.width - 1 - x, y, c);
      }
    }
  }
  return out;
}

RasterImage flip_v(const RasterImage& img) {
  RasterImage out = RasterImage::zeros(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        out.at(x, y, c) = img.at(x, img.height - 1 - y, c);
      }
    }
  }
  return out;
}

namespace detail {

template <typename T>
T sample_bilinear(const T* plane, int w, int h, double x, double y) {
  // Zero fill outside the frame.
  if (x <= -1.0 || y <= -1.0 || x >= w || y >= h) return T(0);
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  auto get = [&](int xx, int yy) -> double {
    if (xx < 0 || yy < 0 || xx >= w || yy >= h) return 0.0;
    return static_cast<double>(plane[static_cast<std::size_t>(yy) * w + xx]);
  };
  const double top = (1.0 - fx) * get(x0, y0) + fx * get(x0 + 1, y0);
  const double bot = (1.0 - fx) * get(x0, y0 + 1) + fx * get(x0 + 1, y0 + 1);
  return static_cast<T>((1.0 - fy) * top + fy * bot);
}

template <typename T>
void rotate_plane(const T* src, T* dst, int w, int h, double angle_deg,
                  Interp interp) {
  const double rad = angle_deg * M_PI / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Inverse rotation of the destination coordinate.
      const double dx = x - cx, dy = y - cy;
      const double sx = c * dx + s * dy + cx;
      const double sy = -s * dx + c * dy + cy;
      T value = T(0);
      if (interp == Interp::nearest) {
        const long ix = std::lround(sx), iy = std::lround(sy);
        if (ix >= 0 && iy >= 0 && ix < w && iy < h) {
          value = src[static_cast<std::size_t>(iy) * w + ix];
        }
      } else {
        value = sample_bilinear(src, w, h, sx, sy);
      }
      dst[static_cast<std::size_t>(y) * w + x] = value;
    }
  }
}

template void rotate_plane<double>(const double*, double*, int, int, double,
                                   Interp);
template void rotate_plane<float>(const float*, float*, int, int, double,
                                  Interp);
template double sample_bilinear<double>(const double*, int, int, double,
                                        double);
template float sample_bilinear<float>(const float*, int, int, double, double);

}  // namespace detail

RasterImage rotate(const RasterImage& img, double angle_deg, Interp interp) {
  RasterImage out = RasterImage::zeros(img.width, img.height, img.channels);
  std::vector<double> src_plane(img.pixel_count());
  std::vector<double> dst_plane(img.pixel_count());
  for (int c = 0; c < img.channels; ++c) {
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      src_plane[i] = img.data[i * img.channels + c];
    }
    detail::rotate_plane(src_plane.data(), dst_plane.data(), img.width,
                         img.height, angle_deg, interp);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      out.data[i * img.channels + c] = dst_plane[i];
    }
  }
  return out;
}

Grid extract_channel(const RasterImage& img, int c) {
  Grid g = Grid::zeros(img.width, img.height);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    g.data[i] = img.data[i * img.channels + c];
  }
  return g;
}

Grid lab_channel(const LabImage& img, int c) {
  Grid g = Grid::zeros(img.width, img.height);
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t i = 0; i < n; ++i) {
    g.data[i] = img.data[i * 3 + c];
  }
  return g;
}

}  // namespace siqa
