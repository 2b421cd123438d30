#include "siqa/nn/grad_cam.hpp"

#include <algorithm>
#include <cmath>

#include "siqa/errors.hpp"

namespace siqa::nn {

std::vector<Grid> grad_cam(const Model& model,
                           const std::vector<Tensor4>& inputs,
                           int target_class) {
  if (target_class < 0 || target_class > 2) {
    throw ShapeMismatch("grad_cam: target class out of range");
  }
  if (!inputs.empty() && inputs[0].n != 1) {
    throw ShapeMismatch("grad_cam expects a single sample");
  }

  ForwardTrace trace;
  model_forward(model, inputs, &trace);

  const int per_branch = model.config.widths.back();
  std::vector<Grid> maps;
  for (int b = 0; b < model.branch_count(); ++b) {
    const BackboneTrace& branch = trace.branches[b];
    const int last = model.config.blocks() - 1;
    const Tensor4& activations = branch.relu_out[last];

    // d(logit)/d(features) of this branch is the head weight row slice;
    // push it back through GAP and the final pool to the last activations.
    std::vector<double> grad_features(per_branch);
    for (int j = 0; j < per_branch; ++j) {
      grad_features[j] =
          model.head.weights[static_cast<std::size_t>(target_class) *
                                 model.head.feature_dim +
                             static_cast<std::size_t>(b) * per_branch + j];
    }
    const Tensor4& pooled = branch.pools[last].y;
    Tensor4 grad = gap_backward(grad_features, pooled.n, pooled.c, pooled.h,
                                pooled.w);
    grad = maxpool2x2_backward(activations, grad, branch.pools[last].argmax);

    // Per-channel weights: spatial mean of the gradient.
    const std::size_t plane = activations.plane();
    Grid cam = Grid::zeros(activations.w, activations.h);
    for (int c = 0; c < activations.c; ++c) {
      const double* gp = grad.data.data() + static_cast<std::size_t>(c) * plane;
      double alpha = 0.0;
      for (std::size_t k = 0; k < plane; ++k) alpha += gp[k];
      alpha /= static_cast<double>(plane);

      const double* ap =
          activations.data.data() + static_cast<std::size_t>(c) * plane;
      for (std::size_t k = 0; k < plane; ++k) cam.data[k] += alpha * ap[k];
    }
    for (double& v : cam.data) v = std::max(v, 0.0);

    Grid upsampled =
        resize_grid(cam, inputs[b].w, inputs[b].h, Interp::bilinear);
    const double max_value =
        *std::max_element(upsampled.data.begin(), upsampled.data.end());
    if (max_value > 0.0) {
      for (double& v : upsampled.data) v /= max_value;
    }
    maps.push_back(std::move(upsampled));
  }
  return maps;
}

}  // namespace siqa::nn
