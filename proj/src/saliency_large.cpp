#include <algorithm>
#include <cmath>

#include "siqa/errors.hpp"
#include "siqa/saliency.hpp"

namespace siqa {

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
}

Grid contrast_map(const LabImage& lab, const FovMask& fov) {
  if (lab.width != fov.width || lab.height != fov.height) {
    throw DimensionMismatch("contrast_map: lab/fov size mismatch");
  }
  const std::size_t fov_count = fov.count();
  if (fov_count == 0) throw EmptyFov("contrast_map: empty FoV");

  // Global mean Lab vector over fundus pixels only; the black surround would
  // otherwise dominate it.
  double mean[3] = {0.0, 0.0, 0.0};
  for (int y = 0; y < lab.height; ++y) {
    for (int x = 0; x < lab.width; ++x) {
      if (!fov.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) mean[c] += lab.at(x, y, c);
    }
  }
  for (double& m : mean) m /= static_cast<double>(fov_count);

  const Grid lp[3] = {gaussian5(lab_channel(lab, 0)),
                      gaussian5(lab_channel(lab, 1)),
                      gaussian5(lab_channel(lab, 2))};

  Grid out = Grid::zeros(lab.width, lab.height);
  for (int y = 0; y < lab.height; ++y) {
    for (int x = 0; x < lab.width; ++x) {
      if (!fov.at(x, y)) continue;
      double sq = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double d = mean[c] - lp[c].at(x, y);
        sq += d * d;
      }
      out.at(x, y) = std::sqrt(sq);
    }
  }
  return out;
}

SaliencyMap normalize_max(const Grid& m) {
  double max_value = 0.0;
  for (double v : m.data) {
    if (v < 0.0) throw NegativeInput("normalize_max: negative value");
    max_value = std::max(max_value, v);
  }
  SaliencyMap out;
  out.width = m.width;
  out.height = m.height;
  out.data.assign(m.data.size(), 0.0);
  if (max_value > 0.0) {
    for (std::size_t i = 0; i < m.data.size(); ++i) {
      out.data[i] = m.data[i] / max_value;
    }
  }
  return out;
}

BinaryMask threshold_large(const SaliencyMap& p, const FovMask& fov) {
  if (p.width != fov.width || p.height != fov.height) {
    throw DimensionMismatch("threshold_large: size mismatch");
  }
  const std::size_t fov_count = fov.count();
  if (fov_count == 0) throw EmptyFov("threshold_large: empty FoV");

  double mean = 0.0;
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      if (fov.at(x, y)) mean += p.at(x, y);
    }
  }
  mean /= static_cast<double>(fov_count);
  const double tau = std::min(1.0, 2.0 * mean);

  // tau degenerates to 0 only for an all-zero map, which must stay empty.
  BinaryMask mask = BinaryMask::empty(p.width, p.height);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const double v = p.at(x, y);
      mask.set(x, y, fov.at(x, y) && v > 0.0 && v >= tau);
    }
  }
  return mask;
}

LargeStructures detect_large(const RasterImage& rgb, const FovMask& fov) {
  const LabImage lab = rgb_to_lab(rgb);
  SaliencyMap probability = normalize_max(contrast_map(lab, fov));
  BinaryMask mask = threshold_large(probability, fov);
  return {std::move(probability), std::move(mask)};
}

}  // namespace siqa
