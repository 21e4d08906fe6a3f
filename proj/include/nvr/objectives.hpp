#pragma once

#include <cstdint>

#include <torch/torch.h>

namespace nvr {

struct LossWeights {
  double temporal = 100.0;      // lambda_Temp
  double feature = 10.0;        // lambda_f
  double l2 = 200.0;            // lambda_l2
  double learning_rate = 0.002;

  bool operator==(const LossWeights&) const = default;
};

// Conditional patch discriminator over concat(pose label, image); returns a
// logit score map.
struct PatchDiscriminatorOptions {
  int pose_channels = 6;
  int image_channels = 3;
  int base_width = 32;
  int n_layers = 3;
};

class PatchDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit PatchDiscriminatorImpl(const PatchDiscriminatorOptions& options);
  torch::Tensor forward(const torch::Tensor& pose, const torch::Tensor& image);

 private:
  PatchDiscriminatorOptions options_;
  torch::nn::Sequential body_{nullptr};
};
TORCH_MODULE(PatchDiscriminator);

// Frozen random convolutional pyramid used as the perceptual feature space.
// Weights are drawn from a private generator seeded with `seed` and stored
// as buffers, so they never reach an optimiser.
class FeatureExtractorImpl : public torch::nn::Module {
 public:
  explicit FeatureExtractorImpl(std::uint64_t seed = 1234, int levels = 3, int base_width = 16);
  std::vector<torch::Tensor> forward(const torch::Tensor& image);
  int levels() const { return static_cast<int>(weights_.size()); }

 private:
  std::vector<torch::Tensor> weights_;
  std::vector<torch::Tensor> biases_;
};
TORCH_MODULE(FeatureExtractor);

// Adversarial terms from discriminator logits, binary cross-entropy form.
//   d_loss = BCE(real, 1) + BCE(fake, 0), each a mean over score elements.
//   g_loss = BCE(fake, 1) (non-saturating generator loss).
torch::Tensor discriminator_loss(const torch::Tensor& real_logits, const torch::Tensor& fake_logits);
torch::Tensor generator_adversarial_loss(const torch::Tensor& fake_logits);

struct GanLosses {
  torch::Tensor d_loss;  // uses the synthesized image detached
  torch::Tensor g_loss;  // gradient flows into the synthesized image
};
GanLosses gan_loss(PatchDiscriminator& discriminator, const torch::Tensor& pose, const torch::Tensor& synthesized,
                   const torch::Tensor& real);

// sqrt(mean((a-b)^2)) with a zero gradient where a == b everywhere.
torch::Tensor rms_distance(const torch::Tensor& a, const torch::Tensor& b);

// lambda_f * sum_levels mean|F_l(syn) - F_l(real)| + lambda_l2 * rms(syn - real).
torch::Tensor supervised_loss(FeatureExtractor& features, const torch::Tensor& synthesized, const torch::Tensor& real,
                              const LossWeights& weights);

// (1/D) sum_k c_k sum_channels |cur - warp(prev, flow)|, averaged over the
// batch. cur/prev {B, 3, H, W}, flow {B, 2, H, W}, confidence {B, 1, H, W}.
torch::Tensor temporal_loss(const torch::Tensor& current, const torch::Tensor& previous, const torch::Tensor& flow,
                            const torch::Tensor& confidence);

// Everything the two-frame objective needs about one frame.
struct FrameTerms {
  torch::Tensor pose;              // {1, 6, H, W}
  torch::Tensor synthesized;       // I_syn {1, 3, H, W}
  torch::Tensor synthesized_static;  // composite of the colour channels {1, 3, H, W}
  torch::Tensor real;              // {1, 3, H, W}
};

struct ObjectiveOptions {
  bool adversarial = true;
  bool regular = true;  // include the static-component supervised term
};

struct ObjectiveTerms {
  torch::Tensor g_total;
  torch::Tensor d_total;
  torch::Tensor gan_g;       // summed over both frames
  torch::Tensor supervised;  // summed over both frames
  torch::Tensor regular;     // summed over both frames
  torch::Tensor temporal;    // unweighted temporal loss of the pair
};

// Two-frame objective over frames t-1 (`previous`) and t (`current`):
//   g_total = sum_i [gan_g(i) + sup(I_syn^i) + sup(static^i)] + lambda_Temp * temporal
//   d_total = sum_i gan_d(i)
// Throws DataError when flow or confidence is undefined.
ObjectiveTerms total_objective(PatchDiscriminator& discriminator, FeatureExtractor& features,
                               const FrameTerms& previous, const FrameTerms& current, const torch::Tensor& flow,
                               const torch::Tensor& confidence, const LossWeights& weights,
                               const ObjectiveOptions& options = {});

}  // namespace nvr
