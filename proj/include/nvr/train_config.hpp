#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nvr/objectives.hpp"

namespace nvr {

// Everything that configures pretraining, joint training and evaluation.
// Epoch counts default to the full-scale schedule (5 pretraining / 30 joint
// epochs); desk-scale runs cap them with max_steps.
struct TrainConfig {
  std::string dataset;
  std::vector<std::string> pretrain_datasets;

  int image_height = 64;
  int image_width = 64;
  int n_parts = 24;
  int texture_resolution = 64;

  int pretrain_epochs = 5;
  int pretrain_batch = 4;
  int pretrain_max_steps = 0;  // 0 = no cap
  int epochs = 30;
  int max_steps = 0;           // 0 = no cap

  LossWeights weights;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // steps between checkpoints, 0 = final only
  int log_every = 50;

  int uv_base_width = 32;
  int uv_res_blocks = 2;
  int d2g_base_width = 32;
  int d2g_res_blocks = 4;
  int n_down = 2;
  int disc_base_width = 32;
  int disc_layers = 3;
  std::uint64_t feature_seed = 1234;

  bool use_d2g = true;
  bool pose_conditioned = true;
  bool regular_loss = true;
  bool adversarial = true;
  int d_steps_per_g_step = 1;
  // "ground_truth": foreground masks from part ids; "segmenter": from the
  // (pre)trained UV generator's background probability.
  std::string background_init = "ground_truth";

  double validation_ratio = 0.1;
  int validation_block = 10;
  int robust_m = 10;

  // Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

nlohmann::json train_config_to_json(const TrainConfig& config);
// Rejects unknown keys; missing keys keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig load_train_config(const std::filesystem::path& path);

// Fields that change tensor shapes, hashed into checkpoints.
nlohmann::json architecture_json(const TrainConfig& config);
std::string architecture_hash(const TrainConfig& config);

}  // namespace nvr
