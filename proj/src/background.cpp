#include "nvr/background.hpp"

#include <iostream>

#include "nvr/errors.hpp"
#include "nvr/tensor_convert.hpp"

namespace nvr {

BackgroundImage::BackgroundImage(const Image& image, torch::Dtype dtype) {
  if (image.channels != 3) throw ShapeError("background must have 3 channels");
  data_ = image_to_tensor(image, dtype);
}

Image BackgroundImage::to_image() const { return tensor_to_image(data_); }

void BackgroundImage::clamp() {
  torch::NoGradGuard no_grad;
  data_.clamp_(0.0, 1.0);
}

void BackgroundImage::replace(const Image& image) {
  if (image.channels != 3 || image.height != height() || image.width != width()) {
    throw ShapeError("replacement background must be " + std::to_string(height()) + "x" + std::to_string(width()) +
                     "x3");
  }
  torch::NoGradGuard no_grad;
  data_.copy_(image_to_tensor(image, data_.scalar_type()));
}

BackgroundInit init_background(std::span<const Image> frames, std::span<const LabelMap> foreground_masks) {
  if (frames.empty()) throw ArgumentError("init_background needs at least one frame");
  if (frames.size() != foreground_masks.size()) throw ShapeError("init_background: one mask per frame required");
  const int H = frames[0].height;
  const int W = frames[0].width;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].height != H || frames[t].width != W || frames[t].channels != 3) {
      throw ShapeError("init_background: frames differ in shape");
    }
    if (foreground_masks[t].height != H || foreground_masks[t].width != W) {
      throw ShapeError("init_background: mask not aligned with frame");
    }
  }
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  std::vector<double> sum(plane * 3, 0.0);
  std::vector<int> count(plane, 0);
  double global[3] = {0.0, 0.0, 0.0};
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (std::size_t p = 0; p < plane; ++p) {
      for (int c = 0; c < 3; ++c) global[c] += frames[t].data[3 * p + c];
      if (foreground_masks[t].data[p]) continue;
      ++count[p];
      for (int c = 0; c < 3; ++c) sum[3 * p + c] += frames[t].data[3 * p + c];
    }
  }
  BackgroundInit init;
  init.image = Image(H, W, 3);
  std::vector<std::uint8_t> known(plane, 0);
  for (std::size_t p = 0; p < plane; ++p) {
    if (count[p] == 0) {
      ++init.filled_pixels;
      continue;
    }
    known[p] = 1;
    for (int c = 0; c < 3; ++c) init.image.data[3 * p + c] = static_cast<float>(sum[3 * p + c] / count[p]);
  }
  if (!diffusion_fill(init.image, known)) {
    init.all_foreground_fallback = true;
    const double n = static_cast<double>(frames.size() * plane);
    for (std::size_t p = 0; p < plane; ++p) {
      for (int c = 0; c < 3; ++c) init.image.data[3 * p + c] = static_cast<float>(global[c] / n);
    }
    std::cerr << "warning: every pixel is foreground in every frame; background initialised to the mean colour\n";
  }
  return init;
}

torch::Tensor composite(const torch::Tensor& foreground, const torch::Tensor& background,
                        const torch::Tensor& background_prob) {
  if (foreground.dim() != 4 || foreground.size(1) != 3) throw ShapeError("composite: foreground must be {B, 3, H, W}");
  const auto bg = background.dim() == 3 ? background.unsqueeze(0) : background;
  if (bg.dim() != 4 || bg.size(1) != 3 || bg.size(2) != foreground.size(2) || bg.size(3) != foreground.size(3) ||
      (bg.size(0) != 1 && bg.size(0) != foreground.size(0))) {
    throw ShapeError("composite: background not aligned with foreground");
  }
  if (background_prob.dim() != 4 || background_prob.size(1) != 1 || background_prob.size(0) != foreground.size(0) ||
      background_prob.size(2) != foreground.size(2) || background_prob.size(3) != foreground.size(3)) {
    throw ShapeError("composite: background probability must be {B, 1, H, W}");
  }
  return foreground * (1.0 - background_prob) + bg * background_prob;
}

}  // namespace nvr
