#include "nvr/d2g_net.hpp"

#include "nvr/errors.hpp"
#include "nvr/layers.hpp"

namespace nvr {

namespace nn = torch::nn;

D2GNetImpl::D2GNetImpl(const D2GOptions& options) : options_(options) {
  if (options.base_width < 2 || options.n_down < 0 || options.n_res < 0) throw ConfigError("invalid D2G options");
  const int w = options.base_width;
  const int deep = w << options.n_down;

  feature_encoder_ = register_module("feature_encoder", nn::Sequential());
  layers::append(feature_encoder_, layers::conv_block(options.feature_channels, w, 7, 1));
  for (int i = 0; i < options.n_down; ++i) layers::append(feature_encoder_, layers::conv_block(w << i, w << (i + 1), 3, 2));

  int fused_in = deep;
  if (options.pose_conditioned) {
    const int pw = w / 2;
    pose_encoder_ = register_module("pose_encoder", nn::Sequential());
    layers::append(pose_encoder_, layers::conv_block(options.pose_channels, pw, 7, 1));
    for (int i = 0; i < options.n_down; ++i) layers::append(pose_encoder_, layers::conv_block(pw << i, pw << (i + 1), 3, 2));
    fused_in += pw << options.n_down;
  }
  fuse_ = register_module("fuse", layers::conv_block(fused_in, deep, 3, 1));

  trunk_ = register_module("trunk", nn::Sequential());
  for (int i = 0; i < options.n_res; ++i) trunk_->push_back(layers::ResidualBlock(deep));

  decoder_ = register_module("decoder", nn::Sequential());
  for (int i = options.n_down; i > 0; --i) {
    decoder_->push_back(nn::ConvTranspose2d(nn::ConvTranspose2dOptions(w << i, w << (i - 1), 4).stride(2).padding(1)));
    decoder_->push_back(nn::InstanceNorm2d(nn::InstanceNorm2dOptions(w << (i - 1)).affine(true)));
    decoder_->push_back(nn::ReLU());
  }
  decoder_->push_back(nn::Conv2d(nn::Conv2dOptions(w, 3, 7).padding(3)));
  decoder_->push_back(nn::Tanh());
}

torch::Tensor D2GNetImpl::forward(const torch::Tensor& feature, const torch::Tensor& pose) {
  if (feature.dim() != 4 || feature.size(1) != options_.feature_channels) {
    throw ShapeError("D2G expects feature {B, 18, H, W}");
  }
  const int64_t divisor = int64_t{1} << options_.n_down;
  if (feature.size(2) % divisor != 0 || feature.size(3) % divisor != 0) {
    throw ShapeError("D2G input size must be divisible by 2^n_down");
  }
  auto x = feature_encoder_->forward(feature);
  if (options_.pose_conditioned) {
    if (!pose.defined() || pose.dim() != 4 || pose.size(1) != options_.pose_channels || pose.size(0) != feature.size(0) ||
        pose.size(2) != feature.size(2) || pose.size(3) != feature.size(3)) {
      throw ShapeError("D2G pose label must be {B, 6, H, W} aligned with the feature");
    }
    x = torch::cat({x, pose_encoder_->forward(pose)}, 1);
  }
  x = trunk_->forward(fuse_->forward(x));
  return (decoder_->forward(x) + 1.0) * 0.5;
}

}  // namespace nvr
