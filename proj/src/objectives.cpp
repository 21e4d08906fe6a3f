#include "nvr/objectives.hpp"

#include <cmath>

#include <ATen/CPUGeneratorImpl.h>

#include "nvr/errors.hpp"
#include "nvr/flow_warp.hpp"

namespace nvr {

namespace nn = torch::nn;

PatchDiscriminatorImpl::PatchDiscriminatorImpl(const PatchDiscriminatorOptions& options) : options_(options) {
  const int w = options.base_width;
  nn::Sequential seq;
  seq->push_back(nn::Conv2d(nn::Conv2dOptions(options.pose_channels + options.image_channels, w, 4).stride(2).padding(1)));
  seq->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
  int channels = w;
  for (int i = 1; i < options.n_layers; ++i) {
    const int next = w << std::min(i, 3);
    const int stride = i < options.n_layers - 1 ? 2 : 1;
    seq->push_back(nn::Conv2d(nn::Conv2dOptions(channels, next, 4).stride(stride).padding(1)));
    seq->push_back(nn::InstanceNorm2d(nn::InstanceNorm2dOptions(next).affine(true)));
    seq->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
    channels = next;
  }
  seq->push_back(nn::Conv2d(nn::Conv2dOptions(channels, 1, 4).stride(1).padding(1)));
  body_ = register_module("body", seq);
}

torch::Tensor PatchDiscriminatorImpl::forward(const torch::Tensor& pose, const torch::Tensor& image) {
  if (pose.dim() != 4 || image.dim() != 4 || pose.size(0) != image.size(0) || pose.size(2) != image.size(2) ||
      pose.size(3) != image.size(3)) {
    throw ShapeError("discriminator: pose and image must be aligned {B, C, H, W}");
  }
  return body_->forward(torch::cat({pose, image}, 1));
}

FeatureExtractorImpl::FeatureExtractorImpl(std::uint64_t seed, int levels, int base_width) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  int in = 3;
  for (int l = 0; l < levels; ++l) {
    const int out = base_width << l;
    const double stddev = std::sqrt(2.0 / (in * 9));
    auto w = torch::randn({out, in, 3, 3}, gen, torch::kFloat32) * stddev;
    auto b = torch::zeros({out});
    weights_.push_back(register_buffer("w" + std::to_string(l), w));
    biases_.push_back(register_buffer("b" + std::to_string(l), b));
    in = out;
  }
}

std::vector<torch::Tensor> FeatureExtractorImpl::forward(const torch::Tensor& image) {
  std::vector<torch::Tensor> out;
  auto x = image;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (l > 0) x = torch::avg_pool2d(x, 2);
    x = torch::relu(torch::conv2d(x, weights_[l].to(x.scalar_type()), biases_[l].to(x.scalar_type()), 1, 1));
    out.push_back(x);
  }
  return out;
}

torch::Tensor discriminator_loss(const torch::Tensor& real_logits, const torch::Tensor& fake_logits) {
  return torch::binary_cross_entropy_with_logits(real_logits, torch::ones_like(real_logits)) +
         torch::binary_cross_entropy_with_logits(fake_logits, torch::zeros_like(fake_logits));
}

torch::Tensor generator_adversarial_loss(const torch::Tensor& fake_logits) {
  return torch::binary_cross_entropy_with_logits(fake_logits, torch::ones_like(fake_logits));
}

GanLosses gan_loss(PatchDiscriminator& discriminator, const torch::Tensor& pose, const torch::Tensor& synthesized,
                   const torch::Tensor& real) {
  if (synthesized.sizes() != real.sizes()) throw ShapeError("gan_loss: synthesized and real images differ in shape");
  GanLosses out;
  out.d_loss = discriminator_loss(discriminator->forward(pose, real), discriminator->forward(pose, synthesized.detach()));
  out.g_loss = generator_adversarial_loss(discriminator->forward(pose, synthesized));
  return out;
}

torch::Tensor rms_distance(const torch::Tensor& a, const torch::Tensor& b) {
  const auto mse = (a - b).pow(2).mean();
  const auto positive = mse > 0;
  const auto safe = torch::where(positive, mse, torch::ones_like(mse));
  return torch::where(positive, safe.sqrt(), torch::zeros_like(mse));
}

torch::Tensor supervised_loss(FeatureExtractor& features, const torch::Tensor& synthesized, const torch::Tensor& real,
                              const LossWeights& weights) {
  if (synthesized.sizes() != real.sizes()) throw ShapeError("supervised_loss: image shapes differ");
  auto loss = weights.l2 * rms_distance(synthesized, real);
  if (weights.feature != 0.0) {
    const auto fs = features->forward(synthesized);
    const auto fr = features->forward(real);
    for (std::size_t l = 0; l < fs.size(); ++l) loss = loss + weights.feature * (fs[l] - fr[l]).abs().mean();
  }
  return loss;
}

torch::Tensor temporal_loss(const torch::Tensor& current, const torch::Tensor& previous, const torch::Tensor& flow,
                            const torch::Tensor& confidence) {
  if (current.sizes() != previous.sizes()) throw ShapeError("temporal_loss: frame shapes differ");
  if (confidence.dim() != 4 || confidence.size(1) != 1 || confidence.size(0) != current.size(0) ||
      confidence.size(2) != current.size(2) || confidence.size(3) != current.size(3)) {
    throw ShapeError("temporal_loss: confidence must be {B, 1, H, W}");
  }
  const auto warped = warp(previous, flow);
  const auto per_pixel = (current - warped).abs().sum(1, /*keepdim=*/true);
  return (confidence.to(current.scalar_type()) * per_pixel).mean();
}

ObjectiveTerms total_objective(PatchDiscriminator& discriminator, FeatureExtractor& features,
                               const FrameTerms& previous, const FrameTerms& current, const torch::Tensor& flow,
                               const torch::Tensor& confidence, const LossWeights& weights,
                               const ObjectiveOptions& options) {
  if (!flow.defined() || !confidence.defined()) throw DataError("total_objective: missing flow or confidence for pair");
  const auto zero = torch::zeros({}, current.synthesized.options());
  ObjectiveTerms t;
  t.gan_g = zero;
  t.d_total = zero;
  t.supervised = zero;
  t.regular = zero;
  for (const FrameTerms* f : {&previous, &current}) {
    if (options.adversarial) {
      const auto gan = gan_loss(discriminator, f->pose, f->synthesized, f->real);
      t.gan_g = t.gan_g + gan.g_loss;
      t.d_total = t.d_total + gan.d_loss;
    }
    t.supervised = t.supervised + supervised_loss(features, f->synthesized, f->real, weights);
    if (options.regular) t.regular = t.regular + supervised_loss(features, f->synthesized_static, f->real, weights);
  }
  t.temporal = temporal_loss(current.synthesized, previous.synthesized, flow, confidence);
  t.g_total = t.gan_g + t.supervised + t.regular + weights.temporal * t.temporal;
  return t;
}

}  // namespace nvr
