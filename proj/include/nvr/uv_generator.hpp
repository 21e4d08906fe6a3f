#pragma once

#include <torch/torch.h>

namespace nvr {

// Per-pixel body-part assignment and chart coordinates.
struct UVPrediction {
  torch::Tensor part_probs;  // {B, N+1, H, W}, softmax over dim 1, index 0 = background
  torch::Tensor log_probs;   // log of part_probs, computed stably from the logits
  torch::Tensor coords;      // {B, N, H, W, 2} (u, v) in [0,1]

  int n_parts() const { return static_cast<int>(coords.size(1)); }
  torch::Tensor background_prob() const { return part_probs.narrow(1, 0, 1); }
};

struct UvGeneratorOptions {
  int n_parts = 24;
  int pose_channels = 6;
  int base_width = 32;
  int n_down = 2;
  int n_res = 2;
  bool instance_norm = true;
};

// U-shaped encoder-decoder: pose label -> part logits (softmax head) and
// part UVs (sigmoid head). Skip connections join encoder and decoder levels.
class UvGeneratorImpl : public torch::nn::Module {
 public:
  explicit UvGeneratorImpl(const UvGeneratorOptions& options);

  // pose {B, 6, H, W}; H and W must be divisible by 2^n_down.
  UVPrediction forward(const torch::Tensor& pose);
  const UvGeneratorOptions& options() const { return options_; }

 private:
  UvGeneratorOptions options_;
  torch::nn::Sequential head_{nullptr};
  torch::nn::ModuleList down_{nullptr};
  torch::nn::Sequential trunk_{nullptr};
  torch::nn::ModuleList up_{nullptr};
  torch::nn::Conv2d out_{nullptr};
};
TORCH_MODULE(UvGenerator);

// Cross entropy of the part probabilities against the ground-truth ids
// (mean over pixels) plus the L1 distance |du| + |dv| between predicted and
// ground-truth UVs of each foreground pixel's own part (mean over
// foreground pixels; zero without foreground).
//   part_ids {B, H, W} int64 in [0, N];  uv_gt {B, H, W, 2}.
struct UvLossTerms {
  torch::Tensor total;
  torch::Tensor cross_entropy;
  torch::Tensor coord_l1;
};
UvLossTerms uv_pretrain_loss(const UVPrediction& pred, const torch::Tensor& part_ids, const torch::Tensor& uv_gt);

// Foreground part accuracy and UV L1 (argmax part vs ground truth), for
// monitoring.
struct UvAccuracy {
  double part_accuracy = 0.0;
  double coord_l1 = 0.0;
  double foreground_iou = 0.0;  // mean over parts present in either map
};
UvAccuracy uv_accuracy(const UVPrediction& pred, const torch::Tensor& part_ids, const torch::Tensor& uv_gt);

}  // namespace nvr
