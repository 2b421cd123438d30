#pragma once

#include <cstddef>
#include <vector>

namespace siqa {

// H x W x C raster with values in [0, 1], row-major, channel-interleaved.
// Channels is 1 (gray) or 3 (RGB).
struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  static RasterImage zeros(int w, int h, int c) {
    RasterImage img;
    img.width = w;
    img.height = h;
    img.channels = c;
    img.data.assign(static_cast<std::size_t>(w) * h * c, 0.0);
    return img;
  }

  double& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
};

// Single-channel real-valued map. Unlike RasterImage it carries no [0,1]
// restriction; it holds gray maps, Lab planes, contrast maps and line
// responses alike.
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  static Grid zeros(int w, int h) {
    Grid g;
    g.width = w;
    g.height = h;
    g.data.assign(static_cast<std::size_t>(w) * h, 0.0);
    return g;
  }

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

// CIELAB image, (L, a, b) interleaved. L in [0, 100]; a, b roughly in
// [-128, 127] for in-gamut sRGB inputs.
struct LabImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  static LabImage zeros(int w, int h) {
    LabImage img;
    img.width = w;
    img.height = h;
    img.data.assign(static_cast<std::size_t>(w) * h * 3, 0.0);
    return img;
  }

  double& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  double at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
};

enum class Interp { bilinear, nearest };

// Rec.601 luma. Input must be 3-channel.
RasterImage to_gray(const RasterImage& img);

// sRGB (D65) -> CIELAB. Input must be 3-channel.
LabImage rgb_to_lab(const RasterImage& img);

// Separable binomial [1,4,6,4,1]/16 smoothing, edge-replicated borders.
Grid gaussian5(const Grid& src);

// Bilinear resize with half-pixel center alignment.
RasterImage resize_bilinear(const RasterImage& img, int w, int h);
Grid resize_grid(const Grid& src, int w, int h, Interp interp);

RasterImage flip_h(const RasterImage& img);
RasterImage flip_v(const RasterImage& img);

// Rotation about the image center; samples falling outside the frame read 0.
RasterImage rotate(const RasterImage& img, double angle_deg, Interp interp);

Grid extract_channel(const RasterImage& img, int c);
Grid lab_channel(const LabImage& img, int c);

namespace detail {

// Shared resampling core for RasterImage / ChannelStack planes.
template <typename T>
void rotate_plane(const T* src, T* dst, int w, int h, double angle_deg,
                  Interp interp);

template <typename T>
T sample_bilinear(const T* plane, int w, int h, double x, double y);

}  // namespace detail

}  // namespace siqa
