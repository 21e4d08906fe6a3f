#pragma once

#include <span>

#include <torch/torch.h>

#include "nvr/image.hpp"

namespace nvr {

// H x W x C image -> {C, H, W} tensor.
torch::Tensor image_to_tensor(const Image& image, torch::Dtype dtype = torch::kFloat32);
// {C, H, W} tensor -> H x W x C image.
Image tensor_to_image(const torch::Tensor& chw);
// Stacks images into {B, C, H, W}.
torch::Tensor stack_images(std::span<const Image> images, torch::Dtype dtype = torch::kFloat32);
// {H, W} int64 tensor of labels.
torch::Tensor labels_to_tensor(const LabelMap& labels);

}  // namespace nvr
