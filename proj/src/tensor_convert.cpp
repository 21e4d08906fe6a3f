#include "nvr/tensor_convert.hpp"

#include "nvr/errors.hpp"

namespace nvr {

torch::Tensor image_to_tensor(const Image& image, torch::Dtype dtype) {
  auto hwc = torch::from_blob(const_cast<float*>(image.data.data()), {image.height, image.width, image.channels},
                              torch::kFloat32);
  return hwc.permute({2, 0, 1}).to(dtype).contiguous();
}

Image tensor_to_image(const torch::Tensor& chw) {
  if (chw.dim() != 3) throw ShapeError("tensor_to_image expects {C, H, W}");
  const auto hwc = chw.detach().to(torch::kCPU, torch::kFloat32).permute({1, 2, 0}).contiguous();
  Image image(static_cast<int>(hwc.size(0)), static_cast<int>(hwc.size(1)), static_cast<int>(hwc.size(2)));
  std::memcpy(image.data.data(), hwc.data_ptr<float>(), image.data.size() * sizeof(float));
  return image;
}

torch::Tensor stack_images(std::span<const Image> images, torch::Dtype dtype) {
  std::vector<torch::Tensor> parts;
  parts.reserve(images.size());
  for (const auto& im : images) parts.push_back(image_to_tensor(im, dtype));
  return torch::stack(parts);
}

torch::Tensor labels_to_tensor(const LabelMap& labels) {
  auto t = torch::empty({labels.height, labels.width}, torch::kInt64);
  auto* p = t.data_ptr<std::int64_t>();
  for (std::size_t i = 0; i < labels.data.size(); ++i) p[i] = labels.data[i];
  return t;
}

}  // namespace nvr
