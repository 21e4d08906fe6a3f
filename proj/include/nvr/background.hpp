#pragma once

#include <span>

#include <torch/torch.h>

#include "nvr/image.hpp"

namespace nvr {

// Learnable background {3, H, W}, kept inside [0,1] by clamp() after each
// optimiser step.
class BackgroundImage {
 public:
  explicit BackgroundImage(const Image& image, torch::Dtype dtype = torch::kFloat32);

  torch::Tensor& tensor() { return data_; }
  const torch::Tensor& tensor() const { return data_; }
  int height() const { return static_cast<int>(data_.size(1)); }
  int width() const { return static_cast<int>(data_.size(2)); }
  Image to_image() const;
  void clamp();
  // Swaps in a new background (e.g. for replacement at inference); throws
  // ShapeError on a size mismatch. The tensor object is updated in place so
  // optimiser references stay valid.
  void replace(const Image& image);

 private:
  torch::Tensor data_;
};

struct BackgroundInit {
  Image image;
  bool all_foreground_fallback = false;  // no pixel was ever background
  int filled_pixels = 0;                 // pixels never seen as background
};

// Per-pixel mean of frames over the frames where the pixel is background
// (mask value 0); never-visible pixels are diffusion-filled. With no
// background pixel at all, falls back to the global mean colour.
BackgroundInit init_background(std::span<const Image> frames, std::span<const LabelMap> foreground_masks);

// I_fg * (1 - P0) + I_bg * P0.
//   fg {B, 3, H, W};  bg {3, H, W} or {B, 3, H, W};  p0 {B, 1, H, W}.
torch::Tensor composite(const torch::Tensor& foreground, const torch::Tensor& background,
                        const torch::Tensor& background_prob);

}  // namespace nvr
