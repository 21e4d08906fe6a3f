#include "nvr/uv_generator.hpp"

#include "nvr/errors.hpp"
#include "nvr/layers.hpp"

namespace nvr {

namespace nn = torch::nn;

UvGeneratorImpl::UvGeneratorImpl(const UvGeneratorOptions& options) : options_(options) {
  if (options.n_parts < 1 || options.base_width < 1 || options.n_down < 0 || options.n_res < 0) {
    throw ConfigError("invalid UV generator options");
  }
  const bool norm = options.instance_norm;
  const int w = options.base_width;
  head_ = register_module("head", layers::conv_block(options.pose_channels, w, 7, 1, norm));
  down_ = register_module("down", nn::ModuleList());
  for (int i = 0; i < options.n_down; ++i) down_->push_back(layers::conv_block(w << i, w << (i + 1), 3, 2, norm));
  const int deep = w << options.n_down;
  trunk_ = register_module("trunk", nn::Sequential());
  for (int i = 0; i < options.n_res; ++i) trunk_->push_back(layers::ResidualBlock(deep, norm));
  up_ = register_module("up", nn::ModuleList());
  for (int i = options.n_down - 1; i >= 0; --i) {
    up_->push_back(layers::up_block(w << (i + 1), w << i, norm));
    up_->push_back(layers::conv_block(2 * (w << i), w << i, 3, 1, norm));
  }
  const int out_channels = (options.n_parts + 1) + 2 * options.n_parts;
  out_ = register_module("out", nn::Conv2d(nn::Conv2dOptions(w, out_channels, 3).padding(1)));
}

UVPrediction UvGeneratorImpl::forward(const torch::Tensor& pose) {
  const int64_t divisor = int64_t{1} << options_.n_down;
  if (pose.dim() != 4 || pose.size(1) != options_.pose_channels) throw ShapeError("UV generator expects {B, 6, H, W}");
  if (pose.size(2) % divisor != 0 || pose.size(3) % divisor != 0) {
    throw ShapeError("UV generator input size must be divisible by 2^n_down");
  }
  std::vector<torch::Tensor> skips;
  auto x = head_->forward(pose);
  for (const auto& m : *down_) {
    skips.push_back(x);
    x = m->as<nn::Sequential>()->forward(x);
  }
  x = trunk_->forward(x);
  for (std::size_t k = 0; k < up_->size(); k += 2) {
    x = up_[k]->as<nn::Sequential>()->forward(x);
    x = torch::cat({x, skips.back()}, 1);
    skips.pop_back();
    x = up_[k + 1]->as<nn::Sequential>()->forward(x);
  }
  const auto out = out_->forward(x);
  const int64_t N = options_.n_parts;
  const int64_t B = out.size(0), H = out.size(2), W = out.size(3);
  const auto logits = out.narrow(1, 0, N + 1);
  UVPrediction pred;
  pred.log_probs = torch::log_softmax(logits, 1);
  pred.part_probs = torch::softmax(logits, 1);
  pred.coords = torch::sigmoid(out.narrow(1, N + 1, 2 * N)).view({B, N, 2, H, W}).permute({0, 1, 3, 4, 2});
  return pred;
}

namespace {

void check_targets(const UVPrediction& pred, const torch::Tensor& part_ids, const torch::Tensor& uv_gt) {
  const auto& p = pred.part_probs;
  if (part_ids.dim() != 3 || part_ids.size(0) != p.size(0) || part_ids.size(1) != p.size(2) ||
      part_ids.size(2) != p.size(3)) {
    throw ShapeError("part id map must be {B, H, W} matching the prediction");
  }
  if (uv_gt.dim() != 4 || uv_gt.size(3) != 2 || uv_gt.size(0) != p.size(0) || uv_gt.size(1) != p.size(2) ||
      uv_gt.size(2) != p.size(3)) {
    throw ShapeError("uv ground truth must be {B, H, W, 2} matching the prediction");
  }
}

// Coordinates of each pixel's ground-truth part (part 1 for background
// pixels, which are masked out by the callers).
torch::Tensor own_part_coords(const UVPrediction& pred, const torch::Tensor& part_ids) {
  const auto idx = (part_ids - 1).clamp_min(0);
  const auto index = idx.unsqueeze(1).unsqueeze(-1).expand({-1, 1, -1, -1, 2});
  return pred.coords.gather(1, index).squeeze(1);
}

}  // namespace

UvLossTerms uv_pretrain_loss(const UVPrediction& pred, const torch::Tensor& part_ids, const torch::Tensor& uv_gt) {
  check_targets(pred, part_ids, uv_gt);
  UvLossTerms t;
  t.cross_entropy = -pred.log_probs.gather(1, part_ids.unsqueeze(1)).mean();
  const auto fg = (part_ids > 0).to(pred.coords.scalar_type());
  const auto diff = (own_part_coords(pred, part_ids) - uv_gt.to(pred.coords.scalar_type())).abs().sum(-1);
  t.coord_l1 = (diff * fg).sum() / fg.sum().clamp_min(1.0);
  t.total = t.cross_entropy + t.coord_l1;
  return t;
}

UvAccuracy uv_accuracy(const UVPrediction& pred, const torch::Tensor& part_ids, const torch::Tensor& uv_gt) {
  torch::NoGradGuard no_grad;
  check_targets(pred, part_ids, uv_gt);
  const auto argmax = pred.part_probs.argmax(1);
  const auto fg = part_ids > 0;
  const double n_fg = fg.sum().item<double>();
  UvAccuracy acc;
  if (n_fg > 0) {
    acc.part_accuracy = ((argmax == part_ids) & fg).sum().item<double>() / n_fg;
    const auto diff = (own_part_coords(pred, part_ids) - uv_gt.to(pred.coords.scalar_type())).abs().sum(-1);
    acc.coord_l1 = diff.masked_select(fg).mean().item<double>();
  }
  double iou_sum = 0.0;
  int present = 0;
  for (int64_t part = 1; part <= pred.n_parts(); ++part) {
    const auto a = argmax == part;
    const auto b = part_ids == part;
    const double uni = (a | b).sum().item<double>();
    if (uni == 0) continue;
    iou_sum += (a & b).sum().item<double>() / uni;
    ++present;
  }
  acc.foreground_iou = present ? iou_sum / present : 1.0;
  return acc;
}

}  // namespace nvr
