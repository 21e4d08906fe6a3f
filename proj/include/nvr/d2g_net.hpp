#pragma once

#include <torch/torch.h>

namespace nvr {

struct D2GOptions {
  int feature_channels = 18;
  int pose_channels = 6;
  int base_width = 32;
  int n_down = 2;
  int n_res = 4;
  bool pose_conditioned = true;
};

// Pose-conditioned translation network turning the mapped hybrid texture
// into the detailed foreground. The feature branch and the pose branch are
// downsampled separately and concatenated before the residual trunk; the
// decoder ends in tanh remapped to [0,1].
class D2GNetImpl : public torch::nn::Module {
 public:
  explicit D2GNetImpl(const D2GOptions& options);

  // feature {B, 18, H, W}, pose {B, 6, H, W} -> {B, 3, H, W} in [0,1].
  // `pose` is ignored (and may be undefined) for unconditioned networks.
  torch::Tensor forward(const torch::Tensor& feature, const torch::Tensor& pose);
  const D2GOptions& options() const { return options_; }

 private:
  D2GOptions options_;
  torch::nn::Sequential feature_encoder_{nullptr};
  torch::nn::Sequential pose_encoder_{nullptr};
  torch::nn::Sequential fuse_{nullptr};
  torch::nn::Sequential trunk_{nullptr};
  torch::nn::Sequential decoder_{nullptr};
};
TORCH_MODULE(D2GNet);

}  // namespace nvr
