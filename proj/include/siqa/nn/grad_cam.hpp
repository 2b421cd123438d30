#pragma once

#include <vector>

#include "siqa/nn/model.hpp"
#include "siqa/raster.hpp"

namespace siqa::nn {

// Gradient-weighted class activation maps for a single sample (batch size 1).
// Channel weights are the spatial means of d(target logit)/d(last conv
// activations); the weighted activation sum is rectified, bilinearly
// upsampled to the input size, and max-normalized (an all-zero map stays
// zero). Returns one map per branch, so two for the dual architecture.
std::vector<Grid> grad_cam(const Model& model,
                           const std::vector<Tensor4>& inputs,
                           int target_class);

}  // namespace siqa::nn
