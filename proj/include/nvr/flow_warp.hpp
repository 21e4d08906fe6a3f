#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include "nvr/image.hpp"

namespace nvr {

// Backward warp: output pixel (x, y) samples the source image bilinearly at
// (x + dx, y + dy). Bilinear taps outside the image contribute zero.
//
// image {B, C, H, W} with flow {B, 2, H, W}, or image {C, H, W} with flow
// {2, H, W}. Differentiable with respect to the image; the flow is treated
// as a precomputed constant.
torch::Tensor warp(const torch::Tensor& image, const torch::Tensor& flow);

// Same operator on H x W x C images (flow H x W x 2), evaluated in double.
Image warp(const Image& image, const Image& flow);

// Number of warp evaluations (either overload) since the last reset.
std::int64_t warp_invocations();
void reset_warp_invocations();

// Warps an H x W x C image and returns the result channel-planar ({C, H, W}
// order) in double precision, without rounding back to float.
std::vector<double> warp_planar(const Image& image, const Image& flow);

}  // namespace nvr
