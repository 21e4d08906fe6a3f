#include "nvr/train_config.hpp"

#include <cstdio>
#include <set>

#include "nvr/errors.hpp"
#include "nvr/io.hpp"

namespace nvr {

namespace {

void check(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(std::string("train config field '") + field + "': " + what);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  check(image_height >= 16 && image_width >= 16, "image_height", "image must be at least 16x16");
  check(image_height % (1 << n_down) == 0 && image_width % (1 << n_down) == 0, "image_height",
        "image size must be divisible by 2^n_down");
  check(n_parts >= 1 && n_parts <= 24, "n_parts", "must be in [1, 24]");
  check(texture_resolution >= 2, "texture_resolution", "must be >= 2");
  check(pretrain_epochs >= 0 && epochs >= 0, "epochs", "must be nonnegative");
  check(pretrain_batch >= 1, "pretrain_batch", "must be >= 1");
  check(max_steps >= 0 && pretrain_max_steps >= 0, "max_steps", "must be nonnegative");
  check(weights.temporal >= 0 && weights.feature >= 0 && weights.l2 >= 0, "weights", "must be nonnegative");
  check(weights.learning_rate > 0, "learning_rate", "must be positive");
  check(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1, "beta1", "betas must be in [0, 1)");
  check(checkpoint_every >= 0, "checkpoint_every", "must be nonnegative");
  check(log_every >= 1, "log_every", "must be >= 1");
  check(uv_base_width >= 1 && d2g_base_width >= 2 && disc_base_width >= 1, "base_width", "must be positive");
  check(uv_res_blocks >= 0 && d2g_res_blocks >= 0 && n_down >= 0 && disc_layers >= 1, "res_blocks",
        "must be nonnegative");
  check(d_steps_per_g_step >= 1, "d_steps_per_g_step", "must be >= 1");
  check(background_init == "ground_truth" || background_init == "segmenter", "background_init",
        "must be 'ground_truth' or 'segmenter'");
  check(validation_ratio > 0 && validation_ratio < 1, "validation_ratio", "must be in (0, 1)");
  check(validation_block >= 2, "validation_block", "must be >= 2");
  check(robust_m >= 0, "robust_m", "must be nonnegative");
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return nlohmann::json{
      {"dataset", c.dataset},
      {"pretrain_datasets", c.pretrain_datasets},
      {"image_height", c.image_height},
      {"image_width", c.image_width},
      {"n_parts", c.n_parts},
      {"texture_resolution", c.texture_resolution},
      {"pretrain_epochs", c.pretrain_epochs},
      {"pretrain_batch", c.pretrain_batch},
      {"pretrain_max_steps", c.pretrain_max_steps},
      {"epochs", c.epochs},
      {"max_steps", c.max_steps},
      {"lambda_temp", c.weights.temporal},
      {"lambda_f", c.weights.feature},
      {"lambda_l2", c.weights.l2},
      {"learning_rate", c.weights.learning_rate},
      {"beta1", c.beta1},
      {"beta2", c.beta2},
      {"seed", c.seed},
      {"checkpoint_every", c.checkpoint_every},
      {"log_every", c.log_every},
      {"uv_base_width", c.uv_base_width},
      {"uv_res_blocks", c.uv_res_blocks},
      {"d2g_base_width", c.d2g_base_width},
      {"d2g_res_blocks", c.d2g_res_blocks},
      {"n_down", c.n_down},
      {"disc_base_width", c.disc_base_width},
      {"disc_layers", c.disc_layers},
      {"feature_seed", c.feature_seed},
      {"use_d2g", c.use_d2g},
      {"pose_conditioned", c.pose_conditioned},
      {"regular_loss", c.regular_loss},
      {"adversarial", c.adversarial},
      {"d_steps_per_g_step", c.d_steps_per_g_step},
      {"background_init", c.background_init},
      {"validation_ratio", c.validation_ratio},
      {"validation_block", c.validation_block},
      {"robust_m", c.robust_m},
  };
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  const nlohmann::json defaults = train_config_to_json(TrainConfig{});
  for (const auto& [key, _] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("train config field '" + key + "': unknown key");
  }
  nlohmann::json merged = defaults;
  merged.update(j);
  TrainConfig c;
  try {
    c.dataset = merged.at("dataset").get<std::string>();
    c.pretrain_datasets = merged.at("pretrain_datasets").get<std::vector<std::string>>();
    c.image_height = merged.at("image_height").get<int>();
    c.image_width = merged.at("image_width").get<int>();
    c.n_parts = merged.at("n_parts").get<int>();
    c.texture_resolution = merged.at("texture_resolution").get<int>();
    c.pretrain_epochs = merged.at("pretrain_epochs").get<int>();
    c.pretrain_batch = merged.at("pretrain_batch").get<int>();
    c.pretrain_max_steps = merged.at("pretrain_max_steps").get<int>();
    c.epochs = merged.at("epochs").get<int>();
    c.max_steps = merged.at("max_steps").get<int>();
    c.weights.temporal = merged.at("lambda_temp").get<double>();
    c.weights.feature = merged.at("lambda_f").get<double>();
    c.weights.l2 = merged.at("lambda_l2").get<double>();
    c.weights.learning_rate = merged.at("learning_rate").get<double>();
    c.beta1 = merged.at("beta1").get<double>();
    c.beta2 = merged.at("beta2").get<double>();
    c.seed = merged.at("seed").get<std::uint64_t>();
    c.checkpoint_every = merged.at("checkpoint_every").get<int>();
    c.log_every = merged.at("log_every").get<int>();
    c.uv_base_width = merged.at("uv_base_width").get<int>();
    c.uv_res_blocks = merged.at("uv_res_blocks").get<int>();
    c.d2g_base_width = merged.at("d2g_base_width").get<int>();
    c.d2g_res_blocks = merged.at("d2g_res_blocks").get<int>();
    c.n_down = merged.at("n_down").get<int>();
    c.disc_base_width = merged.at("disc_base_width").get<int>();
    c.disc_layers = merged.at("disc_layers").get<int>();
    c.feature_seed = merged.at("feature_seed").get<std::uint64_t>();
    c.use_d2g = merged.at("use_d2g").get<bool>();
    c.pose_conditioned = merged.at("pose_conditioned").get<bool>();
    c.regular_loss = merged.at("regular_loss").get<bool>();
    c.adversarial = merged.at("adversarial").get<bool>();
    c.d_steps_per_g_step = merged.at("d_steps_per_g_step").get<int>();
    c.background_init = merged.at("background_init").get<std::string>();
    c.validation_ratio = merged.at("validation_ratio").get<double>();
    c.validation_block = merged.at("validation_block").get<int>();
    c.robust_m = merged.at("robust_m").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  try {
    return train_config_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::json architecture_json(const TrainConfig& c) {
  return nlohmann::json{{"image_height", c.image_height},     {"image_width", c.image_width},
                        {"n_parts", c.n_parts},               {"texture_resolution", c.texture_resolution},
                        {"uv_base_width", c.uv_base_width},   {"uv_res_blocks", c.uv_res_blocks},
                        {"d2g_base_width", c.d2g_base_width}, {"d2g_res_blocks", c.d2g_res_blocks},
                        {"n_down", c.n_down},                 {"disc_base_width", c.disc_base_width},
                        {"disc_layers", c.disc_layers},       {"feature_seed", c.feature_seed},
                        {"use_d2g", c.use_d2g},               {"pose_conditioned", c.pose_conditioned}};
}

std::string architecture_hash(const TrainConfig& config) { return fnv1a_hex(architecture_json(config).dump()); }

}  // namespace nvr
