#pragma once

#include <torch/torch.h>

namespace nvr::layers {

namespace nn = torch::nn;

// conv(k, stride) -> [instance norm] -> ReLU, reflect-free zero padding.
nn::Sequential conv_block(int in_channels, int out_channels, int kernel, int stride, bool norm = true);

// Nearest x2 upsampling followed by a 3x3 conv block.
nn::Sequential up_block(int in_channels, int out_channels, bool norm = true);

// Moves the layers of `src` onto the end of `dst` (Sequentials do not nest).
void append(nn::Sequential& dst, const nn::Sequential& src);

struct ResidualBlockImpl : nn::Module {
  explicit ResidualBlockImpl(int channels, bool norm = true);
  torch::Tensor forward(const torch::Tensor& x);

  nn::Sequential body{nullptr};
};
TORCH_MODULE(ResidualBlock);

}  // namespace nvr::layers
