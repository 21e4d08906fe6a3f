#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "nvr/background.hpp"
#include "nvr/checkpoint.hpp"
#include "nvr/d2g_net.hpp"
#include "nvr/eval_metrics.hpp"
#include "nvr/hybrid_texture.hpp"
#include "nvr/objectives.hpp"
#include "nvr/scene_forge.hpp"
#include "nvr/train_config.hpp"
#include "nvr/uv_generator.hpp"

namespace nvr {

// Dense tensors of one scene, ready for batching.
struct SceneTensors {
  torch::Tensor frames;       // {T, 3, H, W}
  torch::Tensor poses;        // {T, 6, H, W}
  torch::Tensor part_ids;     // {T, H, W} int64
  torch::Tensor uv;           // {T, H, W, 2}
  torch::Tensor flows;        // {T-1, 2, H, W}
  torch::Tensor confidences;  // {T-1, 1, H, W}
  int n_frames() const { return static_cast<int>(frames.size(0)); }
};

// DataError when part ids / UVs are missing or sizes disagree.
SceneTensors scene_tensors(const SyntheticSequence& seq);

// Frames are grouped in consecutive blocks; a seeded choice of blocks forms
// the validation split.
struct DataSplit {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<std::vector<int>> validation_blocks;
};
DataSplit make_split(int n_frames, int block, double ratio, std::uint64_t seed);
// Frames t whose pair (t-1, t) lies entirely in the training split.
std::vector<int> training_pairs(const DataSplit& split);

// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<int> seeded_permutation(int n, std::uint64_t seed);

class RenderModel {
 public:
  explicit RenderModel(const TrainConfig& config, const Image& background);

  struct Output {
    UVPrediction uv;
    torch::Tensor feature;             // {B, 18, H, W}
    torch::Tensor foreground;          // {B, 3, H, W}
    torch::Tensor foreground_static;   // {B, 3, H, W}
    torch::Tensor synthesized;         // {B, 3, H, W}
    torch::Tensor synthesized_static;  // {B, 3, H, W}
  };
  Output render(const torch::Tensor& poses);
  // Composites over `background` ({3, H, W}) instead of the learned one.
  Output render(const torch::Tensor& poses, const torch::Tensor& background);

  const TrainConfig& config() const { return config_; }

  // Optimised tensors of the generator side, in parameter-group order
  // (UV generator, detail network, texture, background).
  NamedParams uv_params();
  NamedParams d2g_params();
  NamedParams texture_params();
  NamedParams background_params();
  NamedParams generator_params();
  NamedParams discriminator_params();

  void export_state(std::map<std::string, torch::Tensor>& out) const;
  void import_state(const std::map<std::string, torch::Tensor>& tensors);

  UvGenerator uvgen{nullptr};
  D2GNet d2g{nullptr};  // null for the static-texture variant
  HybridTexture texture;
  BackgroundImage background;
  PatchDiscriminator disc{nullptr};
  FeatureExtractor features{nullptr};

 private:
  TrainConfig config_;
};

// Rebuilds a trained model; VersionError unless the checkpoint is a joint
// training checkpoint.
RenderModel load_model(const Checkpoint& checkpoint);

struct LossRecord {
  std::int64_t step = 0;
  double g_total = 0.0;
  double d_total = 0.0;
  double gan_g = 0.0;
  double supervised = 0.0;
  double regular = 0.0;
  double temporal = 0.0;
};
void write_loss_log(const std::filesystem::path& path, std::span<const LossRecord> records);

// Multi-scene UV generator pretraining with the part cross entropy plus UV
// L1. Frames of each scene are split like joint training; held-out frames
// are used for accuracy only.
class UvPretrainer {
 public:
  UvPretrainer(const TrainConfig& config, std::span<const SyntheticSequence> scenes);
  // Restores network weights, optimiser moments and the step counter.
  void resume(const Checkpoint& checkpoint);

  double step();  // one optimiser step; returns its loss
  std::int64_t steps_done() const { return step_; }
  std::int64_t total_steps() const;
  std::int64_t steps_per_epoch() const;

  UvAccuracy heldout_accuracy();
  Checkpoint checkpoint() const;
  UvGenerator& generator() { return uvgen_; }

 private:
  struct Sample {
    int scene;
    int frame;
  };
  TrainConfig config_;
  std::vector<SceneTensors> scenes_;
  std::vector<Sample> train_;
  std::vector<Sample> heldout_;
  UvGenerator uvgen_{nullptr};
  std::unique_ptr<torch::optim::Adam> optimizer_;
  std::int64_t step_ = 0;
};

struct TrainerOptions {
  // Written to <dir>/diagnostic.json before a NumericalError is raised.
  std::optional<std::filesystem::path> diagnostic_dir;
};

// Joint end-to-end training on consecutive frame pairs.
class Trainer {
 public:
  // `pretrained` must be a UV pretraining or training checkpoint; without it
  // the UV generator starts from random weights.
  Trainer(const TrainConfig& config, const SyntheticSequence& seq, const Checkpoint* pretrained = nullptr,
          TrainerOptions options = {});
  void resume(const Checkpoint& checkpoint);

  LossRecord step();
  std::int64_t steps_done() const { return step_; }
  std::int64_t total_steps() const;
  std::int64_t steps_per_epoch() const { return static_cast<std::int64_t>(pairs_.size()); }
  // Runs until total_steps(); `on_step` sees every record.
  std::vector<LossRecord> run(const std::function<void(const LossRecord&)>& on_step = {});

  Checkpoint checkpoint() const;
  RenderModel& model() { return *model_; }
  const DataSplit& split() const { return split_; }
  const SceneTensors& data() const { return data_; }
  const BackgroundInit& background_init() const { return background_init_; }
  const std::vector<int>& uncovered_parts() const { return uncovered_parts_; }

 private:
  void dump_diagnostic(const LossRecord& record, const std::string& reason) const;

  TrainConfig config_;
  TrainerOptions options_;
  SceneTensors data_;
  DataSplit split_;
  std::vector<int> pairs_;
  BackgroundInit background_init_;
  std::vector<int> uncovered_parts_;
  std::unique_ptr<RenderModel> model_;
  std::unique_ptr<torch::optim::Adam> g_optimizer_;
  std::unique_ptr<torch::optim::Adam> d_optimizer_;
  std::int64_t step_ = 0;
};

// Frame-by-frame rendering of a pose sequence. Never touches the flow warp.
std::vector<Image> infer_frames(RenderModel& model, std::span<const KeypointSet> poses, const Skeleton& skeleton,
                                const std::optional<Image>& background = std::nullopt);
// <dir>/frames/%06d.png plus <dir>/video.avi (FFV1).
void write_rendering(const std::filesystem::path& dir, std::span<const Image> frames);

// Renders every validation frame (self-transfer) and scores it.
struct Evaluation {
  EvalReport report;
  std::vector<Image> frames;  // in split.validation order
};
Evaluation evaluate_model(RenderModel& model, const SyntheticSequence& seq, const DataSplit& split, int m);
// Scores given frames (one per split.validation entry) against the
// sequence's ground truth; temporal error is taken over consecutive pairs
// inside each validation block.
EvalReport evaluate_frames(std::span<const Image> frames, const SyntheticSequence& seq, const DataSplit& split, int m);

// Foreground IoU of argmax P against ground truth over the given frames,
// averaged over frames.
double foreground_argmax_iou(RenderModel& model, const SceneTensors& data, std::span<const int> frames);

}  // namespace nvr
