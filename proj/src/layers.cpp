#include "nvr/layers.hpp"

namespace nvr::layers {

nn::Sequential conv_block(int in_channels, int out_channels, int kernel, int stride, bool norm) {
  nn::Sequential seq;
  seq->push_back(nn::Conv2d(nn::Conv2dOptions(in_channels, out_channels, kernel).stride(stride).padding(kernel / 2)));
  if (norm) seq->push_back(nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out_channels).affine(true)));
  seq->push_back(nn::ReLU());
  return seq;
}

nn::Sequential up_block(int in_channels, int out_channels, bool norm) {
  nn::Sequential seq;
  seq->push_back(nn::Upsample(
      nn::UpsampleOptions().scale_factor(std::vector<double>{2.0, 2.0}).mode(torch::kNearest)));
  seq->push_back(nn::Conv2d(nn::Conv2dOptions(in_channels, out_channels, 3).padding(1)));
  if (norm) seq->push_back(nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out_channels).affine(true)));
  seq->push_back(nn::ReLU());
  return seq;
}

void append(nn::Sequential& dst, const nn::Sequential& src) {
  for (const auto& layer : *src) dst->push_back(layer);
}

ResidualBlockImpl::ResidualBlockImpl(int channels, bool norm) {
  nn::Sequential seq;
  seq->push_back(nn::Conv2d(nn::Conv2dOptions(channels, channels, 3).padding(1)));
  if (norm) seq->push_back(nn::InstanceNorm2d(nn::InstanceNorm2dOptions(channels).affine(true)));
  seq->push_back(nn::ReLU());
  seq->push_back(nn::Conv2d(nn::Conv2dOptions(channels, channels, 3).padding(1)));
  if (norm) seq->push_back(nn::InstanceNorm2d(nn::InstanceNorm2dOptions(channels).affine(true)));
  body = register_module("body", seq);
}

torch::Tensor ResidualBlockImpl::forward(const torch::Tensor& x) { return x + body->forward(x); }

}  // namespace nvr::layers
