#include <algorithm>
#include <cmath>

#include "siqa/dataset.hpp"
#include "siqa/rng.hpp"

namespace siqa {

namespace {

constexpr double kFovRadius = 104.0;
constexpr double kCenter = (kSyntheticSize - 1) / 2.0;

struct Vec2 {
  double x = 0.0, y = 0.0;
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double smoothstep(double edge0, double edge1, double x) {
  const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

bool inside_fov(double x, double y, double shrink = 1.0) {
  const double dx = x - kCenter, dy = y - kCenter;
  const double r = kFovRadius * shrink;
  return dx * dx + dy * dy <= r * r;
}

// Soft aperture edge: 1 inside, 0 outside, a ~2 px cosine-free falloff.
// A hard staircase rim would register as spurious line responses once an
// image is otherwise featureless (heavy blur).
double fov_coverage(int x, int y) {
  const double rho = std::hypot(x - kCenter, y - kCenter);
  return 1.0 - smoothstep(kFovRadius - 2.0, kFovRadius, rho);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + salt * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct Scene {
  double base[3];
  double disc_color[3];
  FovCircle disc;
  // Darkest vessel coverage per pixel; > 0 marks a ground-truth vessel pixel.
  std::vector<float> vessel_k;

  float& k_at(int x, int y) {
    return vessel_k[static_cast<std::size_t>(y) * kSyntheticSize + x];
  }
};

void stamp_vessel(Scene& scene, double cx, double cy, double width, double k) {
  const int radius = static_cast<int>(std::ceil(width / 2.0));
  const int x0 = std::max(0, static_cast<int>(std::floor(cx)) - radius);
  const int x1 = std::min(kSyntheticSize - 1,
                          static_cast<int>(std::ceil(cx)) + radius);
  const int y0 = std::max(0, static_cast<int>(std::floor(cy)) - radius);
  const int y1 = std::min(kSyntheticSize - 1,
                          static_cast<int>(std::ceil(cy)) + radius);
  const double r2 = (width / 2.0) * (width / 2.0);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy > r2) continue;
      if (!inside_fov(x, y, 0.88)) continue;
      scene.k_at(x, y) = std::max(scene.k_at(x, y), static_cast<float>(k));
    }
  }
}

void walk_trunk(Scene& scene, Rng& rng, double start_angle) {
  Vec2 pos{scene.disc.cx, scene.disc.cy};
  double angle = start_angle;
  const int length = 150 + static_cast<int>(rng.uniform_int(60));
  const double k0 = rng.uniform(0.42, 0.48);
  const double k1 = rng.uniform(0.28, 0.34);
  const double w0 = rng.uniform(1.9, 2.3);
  const double w1 = rng.uniform(1.2, 1.5);
  const double drift = rng.uniform(-0.012, 0.012);
  for (int i = 0; i < length; ++i) {
    const double t = static_cast<double>(i) / length;
    angle += drift + rng.uniform(-0.05, 0.05);
    pos.x += std::cos(angle);
    pos.y += std::sin(angle);
    if (!inside_fov(pos.x, pos.y, 0.87)) break;
    stamp_vessel(scene, pos.x, pos.y, w0 + (w1 - w0) * t, k0 + (k1 - k0) * t);
  }
}

// Faint straight capillaries aligned with the detector's orientation grid.
// Their darkness band sits just above the tiny-structure detection threshold
// of a clean image, so an illumination defect pushes a visible share of the
// mesh below the threshold while the rest of the scene keeps it detectable.
void walk_faint(Scene& scene, Rng& rng) {
  const double angle =
      static_cast<double>(rng.uniform_int(12)) * 15.0 * M_PI / 180.0;
  const double dist = kFovRadius * std::sqrt(rng.uniform(0.05, 0.72));
  const double place = rng.uniform(0.0, 2.0 * M_PI);
  Vec2 pos{kCenter + dist * std::cos(place), kCenter + dist * std::sin(place)};
  const int length = 40 + static_cast<int>(rng.uniform_int(35));
  const double k = rng.uniform(0.074, 0.088);
  const double ux = std::cos(angle), uy = std::sin(angle);
  for (int i = 0; i < length; ++i) {
    pos.x += ux;
    pos.y += uy;
    if (!inside_fov(pos.x, pos.y, 0.87)) break;
    stamp_vessel(scene, pos.x, pos.y, 1.0, k);
  }
}

Scene build_scene(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x5ce9e1));
  Scene scene;
  scene.vessel_k.assign(
      static_cast<std::size_t>(kSyntheticSize) * kSyntheticSize, 0.0f);

  scene.base[0] = 0.52 + rng.uniform(-0.015, 0.015);
  scene.base[1] = 0.30 + rng.uniform(-0.015, 0.015);
  scene.base[2] = 0.13 + rng.uniform(-0.01, 0.01);

  scene.disc_color[0] = 0.98 + rng.uniform(-0.015, 0.01);
  scene.disc_color[1] = 0.92 + rng.uniform(-0.02, 0.02);
  scene.disc_color[2] = 0.60 + rng.uniform(-0.03, 0.03);

  const double disc_angle = rng.uniform(0.0, 2.0 * M_PI);
  const double disc_dist = rng.uniform(0.18, 0.42) * kFovRadius;
  scene.disc.cx = kCenter + disc_dist * std::cos(disc_angle);
  scene.disc.cy = kCenter + disc_dist * std::sin(disc_angle);
  scene.disc.r = rng.uniform(25.0, 27.0);

  const int trunks = 10;
  for (int i = 0; i < trunks; ++i) {
    const double a = 2.0 * M_PI * i / trunks + rng.uniform(-0.3, 0.3);
    walk_trunk(scene, rng, a);
  }
  const int faint = 36 + static_cast<int>(rng.uniform_int(6));
  for (int i = 0; i < faint; ++i) walk_faint(scene, rng);
  return scene;
}

RasterImage render_clean(const Scene& scene) {
  RasterImage img = RasterImage::zeros(kSyntheticSize, kSyntheticSize, 3);
  for (int y = 0; y < kSyntheticSize; ++y) {
    for (int x = 0; x < kSyntheticSize; ++x) {
      const double coverage = fov_coverage(x, y);
      if (coverage <= 0.0) continue;
      const double dx = x - scene.disc.cx, dy = y - scene.disc.cy;
      const double dist = std::sqrt(dx * dx + dy * dy);
      // Disc with a 2.5 px soft rim over the fundus base color.
      const double alpha =
          1.0 - smoothstep(scene.disc.r - 2.5, scene.disc.r, dist);
      const double k =
          scene.vessel_k[static_cast<std::size_t>(y) * kSyntheticSize + x];
      for (int c = 0; c < 3; ++c) {
        const double ground =
            scene.base[c] + alpha * (scene.disc_color[c] - scene.base[c]);
        img.at(x, y, c) = clamp01(ground * (1.0 - k) * coverage);
      }
    }
  }
  return img;
}

// Gaussian blur restricted to the FoV interior: the black surround carries
// zero weight, so the rim stays crisp instead of bleeding darkness inward.
void masked_blur(RasterImage& img, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
  }
  const int n = kSyntheticSize;
  auto pass = [&](const RasterImage& src, RasterImage& dst, bool horizontal) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (!inside_fov(x, y)) continue;
        double acc[3] = {0, 0, 0};
        double total = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int xx = horizontal ? x + i : x;
          const int yy = horizontal ? y : y + i;
          if (xx < 0 || yy < 0 || xx >= n || yy >= n) continue;
          if (!inside_fov(xx, yy)) continue;
          const double w = kernel[i + radius];
          total += w;
          for (int c = 0; c < 3; ++c) acc[c] += w * src.at(xx, yy, c);
        }
        for (int c = 0; c < 3; ++c) dst.at(x, y, c) = acc[c] / total;
      }
    }
  };
  RasterImage tmp = RasterImage::zeros(n, n, 3);
  pass(img, tmp, true);
  pass(tmp, img, false);

  // Restore the soft aperture edge the blur smeared.
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double coverage = fov_coverage(x, y);
      if (coverage >= 1.0) continue;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) *= coverage;
    }
  }
}

void apply_linear_ramp(RasterImage& img, Rng& rng, double amplitude) {
  const double a = rng.uniform(0.0, 2.0 * M_PI);
  const double ux = std::cos(a), uy = std::sin(a);
  for (int y = 0; y < kSyntheticSize; ++y) {
    for (int x = 0; x < kSyntheticSize; ++x) {
      const double t = ((x - kCenter) * ux + (y - kCenter) * uy) / kFovRadius;
      const double factor = 1.0 + amplitude * t;
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) = clamp01(img.at(x, y, c) * factor);
      }
    }
  }
}

// Strong illumination defect: a crescent at one rim losing up to 60% of the
// local brightness, quadratic onset.
void apply_crescent(RasterImage& img, Rng& rng, double amplitude) {
  const double a = rng.uniform(0.0, 2.0 * M_PI);
  const double ux = std::cos(a), uy = std::sin(a);
  constexpr double kOnset = 0.68;
  for (int y = 0; y < kSyntheticSize; ++y) {
    for (int x = 0; x < kSyntheticSize; ++x) {
      const double t = ((x - kCenter) * ux + (y - kCenter) * uy) / kFovRadius;
      const double s = std::clamp((t - kOnset) / (1.0 - kOnset), 0.0, 1.0);
      const double factor = 1.0 - amplitude * s * s;
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) = clamp01(img.at(x, y, c) * factor);
      }
    }
  }
}

// Fundus-colored occluder over the disc neighborhood: it wipes out the
// structures underneath without registering as a new high-contrast region.
void apply_blob(RasterImage& img, Rng& rng, const Scene& scene) {
  const double cx = scene.disc.cx + rng.uniform(-10.0, 10.0);
  const double cy = scene.disc.cy + rng.uniform(-10.0, 10.0);
  const double ax = scene.disc.r * rng.uniform(1.6, 2.2);
  const double ay = scene.disc.r * rng.uniform(1.6, 2.2);
  const double rot = rng.uniform(0.0, M_PI);
  const double cr = std::cos(rot), sr = std::sin(rot);
  const double tint = rng.uniform(0.94, 1.04);
  const double color[3] = {clamp01(scene.base[0] * tint),
                           clamp01(scene.base[1] * tint),
                           clamp01(scene.base[2] * tint)};
  const double alpha_max = rng.uniform(0.90, 0.97);
  for (int y = 0; y < kSyntheticSize; ++y) {
    for (int x = 0; x < kSyntheticSize; ++x) {
      if (!inside_fov(x, y)) continue;
      const double dx = x - cx, dy = y - cy;
      const double ex = (cr * dx + sr * dy) / ax;
      const double ey = (-sr * dx + cr * dy) / ay;
      const double rho = std::sqrt(ex * ex + ey * ey);
      if (rho >= 1.0) continue;
      const double alpha = alpha_max * (1.0 - smoothstep(0.75, 1.0, rho));
      for (int c = 0; c < 3; ++c) {
        img.at(x, y, c) =
            clamp01(img.at(x, y, c) * (1.0 - alpha) + color[c] * alpha);
      }
    }
  }
}

}  // namespace

FovMask synthetic_fov_mask() {
  // Slightly inside the aperture so detector windows never read the soft
  // rim falloff.
  FovMask mask = FovMask::empty(kSyntheticSize, kSyntheticSize);
  for (int y = 0; y < kSyntheticSize; ++y) {
    for (int x = 0; x < kSyntheticSize; ++x) {
      mask.set(x, y, inside_fov(x, y, 0.90));
    }
  }
  return mask;
}

SyntheticSample generate_synthetic(QualityLabel grade, std::uint64_t seed) {
  const Scene scene = build_scene(seed);
  RasterImage img = render_clean(scene);

  Rng effects(mix_seed(seed, 0xef5ec7 + static_cast<std::uint64_t>(grade)));
  switch (grade) {
    case QualityLabel::good:
      break;
    case QualityLabel::usable:
      apply_linear_ramp(img, effects, 0.2);
      break;
    case QualityLabel::reject:
      apply_blob(img, effects, scene);
      masked_blur(img, effects.uniform(6.5, 8.5));
      apply_crescent(img, effects, 0.6);
      break;
  }

  SyntheticSample sample;
  sample.image = std::move(img);
  sample.truth.fov = {kCenter, kCenter, kFovRadius};
  sample.truth.disc = scene.disc;
  for (int y = 0; y < kSyntheticSize; ++y) {
    for (int x = 0; x < kSyntheticSize; ++x) {
      if (scene.vessel_k[static_cast<std::size_t>(y) * kSyntheticSize + x] >
          0.0f) {
        sample.truth.vessel_pixels.emplace_back(static_cast<std::int16_t>(x),
                                                static_cast<std::int16_t>(y));
      }
    }
  }
  return sample;
}

}  // namespace siqa
