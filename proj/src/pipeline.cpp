#include "nvr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "nvr/errors.hpp"
#include "nvr/io.hpp"
#include "nvr/pose_labels.hpp"
#include "nvr/tensor_convert.hpp"
#include "nvr/texture_mapping.hpp"

namespace nvr {

namespace {

constexpr int kEvalBatch = 8;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

torch::Tensor pose_tensor(const KeypointSet& kps, const Skeleton& skeleton, int height, int width) {
  return image_to_tensor(rasterize_pose(kps, skeleton, height, width).data);
}

void check_dataset_matches(const TrainConfig& config, const SyntheticSequence& seq) {
  if (seq.height() != config.image_height || seq.width() != config.image_width) {
    throw DataError("dataset is " + std::to_string(seq.height()) + "x" + std::to_string(seq.width()) +
                    " but the config expects " + std::to_string(config.image_height) + "x" +
                    std::to_string(config.image_width));
  }
  if (seq.n_parts() != config.n_parts) {
    throw DataError("dataset has " + std::to_string(seq.n_parts()) + " parts but the config expects " +
                    std::to_string(config.n_parts));
  }
}

torch::Tensor select_frames(const torch::Tensor& t, std::span<const int> frames) {
  std::vector<std::int64_t> idx(frames.begin(), frames.end());
  return t.index_select(0, torch::tensor(idx, torch::kInt64));
}

NamedParams prefixed(const std::string& prefix, const torch::nn::Module& module) {
  NamedParams out;
  for (const auto& item : module.named_parameters()) out.emplace_back(prefix + "/" + item.key(), item.value());
  return out;
}

std::vector<torch::Tensor> tensors_of(const NamedParams& params) {
  std::vector<torch::Tensor> out;
  for (const auto& p : params) out.push_back(p.second);
  return out;
}

torch::optim::AdamOptions adam_options(const TrainConfig& config) {
  return torch::optim::AdamOptions(config.weights.learning_rate).betas({config.beta1, config.beta2});
}

double scalar(const torch::Tensor& t) { return t.defined() ? t.item<double>() : 0.0; }

}  // namespace

SceneTensors scene_tensors(const SyntheticSequence& seq) {
  const int T = seq.n_frames();
  if (T < 2) throw DataError("a scene needs at least two frames");
  if (static_cast<int>(seq.part_id.size()) != T || static_cast<int>(seq.uv.size()) != T) {
    throw DataError("dataset lacks ground-truth part ids or UVs for some frames");
  }
  if (static_cast<int>(seq.flow.size()) != T - 1 || static_cast<int>(seq.confidence.size()) != T - 1) {
    throw DataError("dataset lacks flow or confidence for some frame pairs");
  }
  SceneTensors out;
  out.frames = stack_images(seq.frames);
  std::vector<torch::Tensor> poses;
  std::vector<torch::Tensor> ids;
  std::vector<torch::Tensor> uvs;
  for (int t = 0; t < T; ++t) {
    poses.push_back(pose_tensor(seq.keypoints[t], seq.skeleton, seq.height(), seq.width()));
    ids.push_back(labels_to_tensor(seq.part_id[t]));
    uvs.push_back(image_to_tensor(seq.uv[t]).permute({1, 2, 0}));
  }
  out.poses = torch::stack(poses);
  out.part_ids = torch::stack(ids);
  out.uv = torch::stack(uvs).contiguous();
  out.flows = stack_images(seq.flow);
  out.confidences = stack_images(seq.confidence);
  return out;
}

std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  return order;
}

DataSplit make_split(int n_frames, int block, double ratio, std::uint64_t seed) {
  if (n_frames < 2) throw ArgumentError("a split needs at least two frames");
  if (block < 1) throw ArgumentError("block size must be positive");
  const int n_blocks = (n_frames + block - 1) / block;
  if (n_blocks < 2) throw ArgumentError("a split needs at least two blocks");
  const int n_val = std::clamp(static_cast<int>(std::lround(n_blocks * ratio)), 1, n_blocks - 1);
  const auto order = seeded_permutation(n_blocks, mix_seed(seed, 17));
  std::vector<int> val_blocks(order.begin(), order.begin() + n_val);
  std::sort(val_blocks.begin(), val_blocks.end());
  std::vector<bool> is_val(n_frames, false);
  DataSplit split;
  for (int b : val_blocks) {
    std::vector<int> frames;
    for (int t = b * block; t < std::min(n_frames, (b + 1) * block); ++t) {
      frames.push_back(t);
      is_val[t] = true;
    }
    split.validation.insert(split.validation.end(), frames.begin(), frames.end());
    split.validation_blocks.push_back(std::move(frames));
  }
  for (int t = 0; t < n_frames; ++t) {
    if (!is_val[t]) split.train.push_back(t);
  }
  return split;
}

std::vector<int> training_pairs(const DataSplit& split) {
  std::vector<int> pairs;
  const std::set<int> train(split.train.begin(), split.train.end());
  for (int t : split.train) {
    if (train.count(t - 1)) pairs.push_back(t);
  }
  return pairs;
}

RenderModel::RenderModel(const TrainConfig& config, const Image& background)
    : texture(config.n_parts, config.texture_resolution), background(background), config_(config) {
  config.validate();
  if (background.height != config.image_height || background.width != config.image_width ||
      background.channels != 3) {
    throw ShapeError("background does not match the configured image size");
  }
  UvGeneratorOptions uv;
  uv.n_parts = config.n_parts;
  uv.base_width = config.uv_base_width;
  uv.n_down = config.n_down;
  uv.n_res = config.uv_res_blocks;
  uvgen = UvGenerator(uv);
  if (config.use_d2g) {
    D2GOptions d;
    d.base_width = config.d2g_base_width;
    d.n_down = config.n_down;
    d.n_res = config.d2g_res_blocks;
    d.pose_conditioned = config.pose_conditioned;
    d2g = D2GNet(d);
  }
  PatchDiscriminatorOptions dopt;
  dopt.base_width = config.disc_base_width;
  dopt.n_layers = config.disc_layers;
  disc = PatchDiscriminator(dopt);
  features = FeatureExtractor(config.feature_seed);
  texture.values().set_requires_grad(true);
  this->background.tensor().set_requires_grad(true);
}

RenderModel::Output RenderModel::render(const torch::Tensor& poses) { return render(poses, background.tensor()); }

RenderModel::Output RenderModel::render(const torch::Tensor& poses, const torch::Tensor& bg) {
  Output out;
  out.uv = uvgen->forward(poses);
  const torch::Tensor samples = sample_parts(texture.values(), out.uv.coords);
  out.feature = blend_parts(out.uv.part_probs, samples);
  out.foreground_static = static_component(out.feature);
  out.foreground = d2g ? d2g->forward(out.feature, poses) : out.foreground_static;
  const torch::Tensor p0 = out.uv.background_prob();
  out.synthesized = composite(out.foreground, bg, p0);
  out.synthesized_static = composite(out.foreground_static, bg, p0);
  return out;
}

NamedParams RenderModel::uv_params() { return prefixed("uvgen", *uvgen); }

NamedParams RenderModel::d2g_params() { return d2g ? prefixed("d2g", *d2g) : NamedParams{}; }

NamedParams RenderModel::texture_params() { return {{"texture/values", texture.values()}}; }

NamedParams RenderModel::background_params() { return {{"background/image", background.tensor()}}; }

NamedParams RenderModel::generator_params() {
  NamedParams out;
  for (auto params : {uv_params(), d2g_params(), texture_params(), background_params()}) {
    out.insert(out.end(), params.begin(), params.end());
  }
  return out;
}

NamedParams RenderModel::discriminator_params() { return prefixed("disc", *disc); }

void RenderModel::export_state(std::map<std::string, torch::Tensor>& out) const {
  export_module("uvgen", *uvgen, out);
  if (d2g) export_module("d2g", *d2g, out);
  export_module("disc", *disc, out);
  out["texture/values"] = texture.values().detach().to(torch::kFloat32).contiguous();
  out["background/image"] = background.tensor().detach().to(torch::kFloat32).contiguous();
}

void RenderModel::import_state(const std::map<std::string, torch::Tensor>& tensors) {
  import_module("uvgen", *uvgen, tensors);
  if (d2g) import_module("d2g", *d2g, tensors);
  import_module("disc", *disc, tensors);
  torch::NoGradGuard no_grad;
  for (auto& [name, dst] : {std::pair<std::string, torch::Tensor>{"texture/values", texture.values()},
                            std::pair<std::string, torch::Tensor>{"background/image", background.tensor()}}) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw VersionError("checkpoint lacks tensor '" + name + "'");
    if (it->second.sizes() != dst.sizes()) throw VersionError("checkpoint tensor '" + name + "' has the wrong shape");
    dst.copy_(it->second);
  }
}

RenderModel load_model(const Checkpoint& checkpoint) {
  if (checkpoint.kind != "train") throw VersionError("expected a training checkpoint, got '" + checkpoint.kind + "'");
  const TrainConfig config = checkpoint_config(checkpoint);
  RenderModel model(config, Image(config.image_height, config.image_width, 3));
  model.import_state(checkpoint.tensors);
  return model;
}

void write_loss_log(const std::filesystem::path& path, std::span<const LossRecord> records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(9);
  out << "step,g_total,d_total,gan_g,supervised,regular,temporal\n";
  for (const auto& r : records) {
    out << r.step << ',' << r.g_total << ',' << r.d_total << ',' << r.gan_g << ',' << r.supervised << ','
        << r.regular << ',' << r.temporal << '\n';
  }
}

// ---------------------------------------------------------------------------
// UV pretraining

UvPretrainer::UvPretrainer(const TrainConfig& config, std::span<const SyntheticSequence> scenes) : config_(config) {
  config.validate();
  if (scenes.size() < 2) throw ConfigError("UV pretraining needs at least two scenes");
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    check_dataset_matches(config, scenes[s]);
    scenes_.push_back(scene_tensors(scenes[s]));
    const DataSplit split =
        make_split(scenes[s].n_frames(), config.validation_block, config.validation_ratio, mix_seed(config.seed, s));
    for (int t : split.train) train_.push_back({static_cast<int>(s), t});
    for (int t : split.validation) heldout_.push_back({static_cast<int>(s), t});
  }
  torch::manual_seed(config.seed);
  UvGeneratorOptions uv;
  uv.n_parts = config.n_parts;
  uv.base_width = config.uv_base_width;
  uv.n_down = config.n_down;
  uv.n_res = config.uv_res_blocks;
  uvgen_ = UvGenerator(uv);
  optimizer_ = std::make_unique<torch::optim::Adam>(uvgen_->parameters(), adam_options(config));
}

std::int64_t UvPretrainer::steps_per_epoch() const {
  return (static_cast<std::int64_t>(train_.size()) + config_.pretrain_batch - 1) / config_.pretrain_batch;
}

std::int64_t UvPretrainer::total_steps() const {
  const std::int64_t full = steps_per_epoch() * config_.pretrain_epochs;
  return config_.pretrain_max_steps > 0 ? std::min<std::int64_t>(full, config_.pretrain_max_steps) : full;
}

double UvPretrainer::step() {
  const std::int64_t per_epoch = steps_per_epoch();
  const std::int64_t epoch = step_ / per_epoch;
  const std::int64_t pos = step_ % per_epoch;
  const auto order = seeded_permutation(static_cast<int>(train_.size()), mix_seed(config_.seed, 1000 + epoch));
  const std::size_t begin = static_cast<std::size_t>(pos * config_.pretrain_batch);
  const std::size_t end = std::min(train_.size(), begin + static_cast<std::size_t>(config_.pretrain_batch));
  std::vector<torch::Tensor> poses, ids, uvs;
  for (std::size_t i = begin; i < end; ++i) {
    const Sample& s = train_[order[i]];
    poses.push_back(scenes_[s.scene].poses[s.frame]);
    ids.push_back(scenes_[s.scene].part_ids[s.frame]);
    uvs.push_back(scenes_[s.scene].uv[s.frame]);
  }
  uvgen_->train();
  optimizer_->zero_grad();
  const UVPrediction pred = uvgen_->forward(torch::stack(poses));
  const UvLossTerms loss = uv_pretrain_loss(pred, torch::stack(ids), torch::stack(uvs));
  const double value = loss.total.item<double>();
  if (!std::isfinite(value)) throw NumericalError("UV pretraining loss is not finite at step " + std::to_string(step_));
  loss.total.backward();
  optimizer_->step();
  ++step_;
  return value;
}

UvAccuracy UvPretrainer::heldout_accuracy() {
  torch::NoGradGuard no_grad;
  UvAccuracy sum;
  int batches = 0;
  for (std::size_t begin = 0; begin < heldout_.size(); begin += kEvalBatch) {
    std::vector<torch::Tensor> poses, ids, uvs;
    for (std::size_t i = begin; i < std::min(heldout_.size(), begin + kEvalBatch); ++i) {
      const Sample& s = heldout_[i];
      poses.push_back(scenes_[s.scene].poses[s.frame]);
      ids.push_back(scenes_[s.scene].part_ids[s.frame]);
      uvs.push_back(scenes_[s.scene].uv[s.frame]);
    }
    const UvAccuracy acc = uv_accuracy(uvgen_->forward(torch::stack(poses)), torch::stack(ids), torch::stack(uvs));
    sum.part_accuracy += acc.part_accuracy;
    sum.coord_l1 += acc.coord_l1;
    sum.foreground_iou += acc.foreground_iou;
    ++batches;
  }
  if (batches > 0) {
    sum.part_accuracy /= batches;
    sum.coord_l1 /= batches;
    sum.foreground_iou /= batches;
  }
  return sum;
}

Checkpoint UvPretrainer::checkpoint() const {
  Checkpoint ck;
  ck.kind = "pretrain";
  ck.step = step_;
  ck.config = train_config_to_json(config_);
  export_module("uvgen", *uvgen_, ck.tensors);
  export_adam("optim_uv", *optimizer_, prefixed("uvgen", *uvgen_), ck.tensors);
  return ck;
}

void UvPretrainer::resume(const Checkpoint& checkpoint) {
  if (checkpoint.kind != "pretrain") throw VersionError("expected a pretraining checkpoint");
  require_compatible(checkpoint, config_, CompatScope::kUvGenerator);
  import_module("uvgen", *uvgen_, checkpoint.tensors);
  import_adam("optim_uv", *optimizer_, prefixed("uvgen", *uvgen_), checkpoint.tensors);
  step_ = checkpoint.step;
}

// ---------------------------------------------------------------------------
// Joint training

Trainer::Trainer(const TrainConfig& config, const SyntheticSequence& seq, const Checkpoint* pretrained,
                 TrainerOptions options)
    : config_(config), options_(std::move(options)) {
  config.validate();
  check_dataset_matches(config, seq);
  data_ = scene_tensors(seq);
  split_ = make_split(seq.n_frames(), config.validation_block, config.validation_ratio, config.seed);
  pairs_ = training_pairs(split_);
  if (pairs_.empty()) throw DataError("the training split contains no consecutive frame pair");

  torch::manual_seed(config.seed);
  model_ = std::make_unique<RenderModel>(config, Image(seq.height(), seq.width(), 3));
  if (pretrained != nullptr) {
    require_compatible(*pretrained, config, CompatScope::kUvGenerator);
    import_module("uvgen", *model_->uvgen, pretrained->tensors);
  }

  // Texture from the unwrapped training frames.
  TextureInitResult tex = initialize_from_video(seq, config.texture_resolution, split_.train);
  uncovered_parts_ = tex.uncovered_parts;
  {
    torch::NoGradGuard no_grad;
    model_->texture.values().copy_(tex.texture.values());
  }

  // Background from the frames' background pixels.
  std::vector<Image> frames;
  std::vector<LabelMap> masks;
  if (config.background_init == "ground_truth") {
    for (int t : split_.train) {
      frames.push_back(seq.frames[t]);
      masks.push_back(seq.part_id[t]);
    }
  } else {
    torch::NoGradGuard no_grad;
    for (std::size_t begin = 0; begin < split_.train.size(); begin += kEvalBatch) {
      const std::size_t end = std::min(split_.train.size(), begin + kEvalBatch);
      std::vector<int> idx(split_.train.begin() + begin, split_.train.begin() + end);
      const torch::Tensor p0 = model_->uvgen->forward(select_frames(data_.poses, idx)).background_prob();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        LabelMap mask(seq.height(), seq.width());
        const torch::Tensor fg = (p0[i][0] < 0.5).to(torch::kUInt8).contiguous();
        std::copy_n(fg.data_ptr<std::uint8_t>(), mask.data.size(), mask.data.begin());
        frames.push_back(seq.frames[idx[i]]);
        masks.push_back(std::move(mask));
      }
    }
  }
  background_init_ = init_background(frames, masks);
  model_->background.replace(background_init_.image);

  std::vector<torch::optim::OptimizerParamGroup> groups;
  for (auto params : {model_->uv_params(), model_->d2g_params(), model_->texture_params(),
                      model_->background_params()}) {
    if (!params.empty()) groups.emplace_back(tensors_of(params));
  }
  g_optimizer_ = std::make_unique<torch::optim::Adam>(groups, adam_options(config));
  d_optimizer_ =
      std::make_unique<torch::optim::Adam>(tensors_of(model_->discriminator_params()), adam_options(config));
}

std::int64_t Trainer::total_steps() const {
  const std::int64_t full = steps_per_epoch() * config_.epochs;
  return config_.max_steps > 0 ? std::min<std::int64_t>(full, config_.max_steps) : full;
}

LossRecord Trainer::step() {
  const std::int64_t per_epoch = steps_per_epoch();
  const std::int64_t epoch = step_ / per_epoch;
  const auto order = seeded_permutation(static_cast<int>(pairs_.size()), mix_seed(config_.seed, 5000 + epoch));
  const int t = pairs_[order[step_ % per_epoch]];
  const std::vector<int> both{t - 1, t};

  const torch::Tensor poses = select_frames(data_.poses, both);
  const torch::Tensor real = select_frames(data_.frames, both);
  RenderModel& m = *model_;
  m.uvgen->train();
  const RenderModel::Output out = m.render(poses);

  auto frame = [&](int i) {
    return FrameTerms{poses.narrow(0, i, 1), out.synthesized.narrow(0, i, 1), out.synthesized_static.narrow(0, i, 1),
                      real.narrow(0, i, 1)};
  };
  const ObjectiveTerms terms =
      total_objective(m.disc, m.features, frame(0), frame(1), data_.flows.narrow(0, t - 1, 1),
                      data_.confidences.narrow(0, t - 1, 1), config_.weights,
                      ObjectiveOptions{config_.adversarial, config_.regular_loss});

  LossRecord record;
  record.step = step_ + 1;
  record.g_total = scalar(terms.g_total);
  record.d_total = scalar(terms.d_total);
  record.gan_g = scalar(terms.gan_g);
  record.supervised = scalar(terms.supervised);
  record.regular = scalar(terms.regular);
  record.temporal = scalar(terms.temporal);
  if (!std::isfinite(record.g_total) || !std::isfinite(record.d_total)) {
    dump_diagnostic(record, "non-finite loss");
    throw NumericalError("non-finite loss at step " + std::to_string(record.step));
  }

  // Generator first: the discriminator update would otherwise invalidate
  // the weights saved in the generator's graph.
  g_optimizer_->zero_grad();
  terms.g_total.backward();
  g_optimizer_->step();
  m.background.clamp();

  if (config_.adversarial) {
    for (int k = 0; k < config_.d_steps_per_g_step; ++k) {
      d_optimizer_->zero_grad();
      torch::Tensor d_loss;
      if (k == 0) {
        d_loss = terms.d_total;
      } else {
        d_loss = gan_loss(m.disc, frame(0).pose, frame(0).synthesized.detach(), frame(0).real).d_loss +
                 gan_loss(m.disc, frame(1).pose, frame(1).synthesized.detach(), frame(1).real).d_loss;
      }
      d_loss.backward();
      d_optimizer_->step();
    }
  }

  ++step_;
  if (step_ % per_epoch == 0) {
    try {
      m.texture.check_finite();
    } catch (const NumericalError& e) {
      dump_diagnostic(record, e.what());
      throw;
    }
  }
  return record;
}

std::vector<LossRecord> Trainer::run(const std::function<void(const LossRecord&)>& on_step) {
  std::vector<LossRecord> records;
  while (step_ < total_steps()) {
    records.push_back(step());
    if (on_step) on_step(records.back());
  }
  return records;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint ck;
  ck.kind = "train";
  ck.step = step_;
  ck.config = train_config_to_json(config_);
  model_->export_state(ck.tensors);
  export_adam("optim_g", *g_optimizer_, model_->generator_params(), ck.tensors);
  export_adam("optim_d", *d_optimizer_, model_->discriminator_params(), ck.tensors);
  return ck;
}

void Trainer::resume(const Checkpoint& checkpoint) {
  if (checkpoint.kind != "train") throw VersionError("expected a training checkpoint");
  require_compatible(checkpoint, config_);
  model_->import_state(checkpoint.tensors);
  import_adam("optim_g", *g_optimizer_, model_->generator_params(), checkpoint.tensors);
  import_adam("optim_d", *d_optimizer_, model_->discriminator_params(), checkpoint.tensors);
  step_ = checkpoint.step;
}

void Trainer::dump_diagnostic(const LossRecord& record, const std::string& reason) const {
  if (!options_.diagnostic_dir) return;
  nlohmann::json j{{"reason", reason},
                   {"step", record.step},
                   {"g_total", std::to_string(record.g_total)},
                   {"d_total", std::to_string(record.d_total)},
                   {"gan_g", std::to_string(record.gan_g)},
                   {"supervised", std::to_string(record.supervised)},
                   {"regular", std::to_string(record.regular)},
                   {"temporal", std::to_string(record.temporal)},
                   {"texture_finite", torch::isfinite(model_->texture.values()).all().item<bool>()},
                   {"background_finite", torch::isfinite(model_->background.tensor()).all().item<bool>()},
                   {"config", train_config_to_json(config_)}};
  io::write_file(*options_.diagnostic_dir / "diagnostic.json", j.dump(2));
}

// ---------------------------------------------------------------------------
// Inference and evaluation

std::vector<Image> infer_frames(RenderModel& model, std::span<const KeypointSet> poses, const Skeleton& skeleton,
                                const std::optional<Image>& background) {
  torch::NoGradGuard no_grad;
  const TrainConfig& config = model.config();
  torch::Tensor bg = model.background.tensor();
  if (background) {
    if (background->height != config.image_height || background->width != config.image_width ||
        background->channels != 3) {
      throw ShapeError("replacement background does not match the model's image size");
    }
    bg = image_to_tensor(*background);
  }
  std::vector<Image> frames;
  for (std::size_t begin = 0; begin < poses.size(); begin += kEvalBatch) {
    std::vector<torch::Tensor> batch;
    for (std::size_t i = begin; i < std::min(poses.size(), begin + kEvalBatch); ++i) {
      batch.push_back(pose_tensor(poses[i], skeleton, config.image_height, config.image_width));
    }
    const torch::Tensor synthesized = model.render(torch::stack(batch), bg).synthesized;
    for (std::int64_t i = 0; i < synthesized.size(0); ++i) frames.push_back(tensor_to_image(synthesized[i]));
  }
  return frames;
}

void write_rendering(const std::filesystem::path& dir, std::span<const Image> frames) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    io::write_png_rgb(dir / "frames" / io::frame_name(static_cast<int>(i), ".png"), frames[i]);
  }
  io::write_video(dir / "video.avi", frames);
}

EvalReport evaluate_frames(std::span<const Image> frames, const SyntheticSequence& seq, const DataSplit& split,
                           int m) {
  if (frames.size() != split.validation.size()) {
    throw ArgumentError("expected one frame per validation index");
  }
  EvalReport report;
  report.m = m;
  std::vector<Image> truth;
  std::vector<KeypointSet> val_poses, train_poses;
  for (int t : split.validation) {
    truth.push_back(seq.frames[t]);
    val_poses.push_back(seq.keypoints[t]);
  }
  for (int t : split.train) train_poses.push_back(seq.keypoints[t]);

  double ssim_sum = 0.0, psnr_sum = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    report.frame_indices.push_back(split.validation[i]);
    report.frame_ssim.push_back(ssim(frames[i], truth[i]));
    report.frame_psnr.push_back(psnr(frames[i], truth[i]));
    ssim_sum += report.frame_ssim.back();
    psnr_sum += report.frame_psnr.back();
  }
  report.ssim = ssim_sum / static_cast<double>(frames.size());
  report.psnr = psnr_sum / static_cast<double>(frames.size());
  report.nn_distance = nearest_neighbor_distances(val_poses, train_poses);

  const int robust_m = std::min<int>(m, static_cast<int>(frames.size()));
  const RobustMetrics robust = robust_subset_metrics(frames, truth, val_poses, train_poses, robust_m);
  report.robust_ssim = robust.ssim;
  report.robust_psnr = robust.psnr;
  for (int i : robust.indices) report.challenging_indices.push_back(split.validation[i]);

  double temporal_sum = 0.0;
  int pairs = 0;
  std::size_t offset = 0;
  for (const auto& block : split.validation_blocks) {
    for (std::size_t k = 1; k < block.size(); ++k) {
      const int t = block[k];
      temporal_sum += pair_temporal_error(frames[offset + k], frames[offset + k - 1], seq.flow[t - 1],
                                          seq.confidence[t - 1]);
      ++pairs;
    }
    offset += block.size();
  }
  report.temporal_error = pairs > 0 ? temporal_sum / pairs : 0.0;
  return report;
}

Evaluation evaluate_model(RenderModel& model, const SyntheticSequence& seq, const DataSplit& split, int m) {
  std::vector<KeypointSet> poses;
  for (int t : split.validation) poses.push_back(seq.keypoints[t]);
  Evaluation out;
  out.frames = infer_frames(model, poses, seq.skeleton);
  out.report = evaluate_frames(out.frames, seq, split, m);
  return out;
}

double foreground_argmax_iou(RenderModel& model, const SceneTensors& data, std::span<const int> frames) {
  torch::NoGradGuard no_grad;
  double sum = 0.0;
  int batches = 0;
  for (std::size_t begin = 0; begin < frames.size(); begin += kEvalBatch) {
    const std::size_t end = std::min(frames.size(), begin + kEvalBatch);
    const std::span<const int> idx = frames.subspan(begin, end - begin);
    const UVPrediction pred = model.uvgen->forward(select_frames(data.poses, idx));
    sum += uv_accuracy(pred, select_frames(data.part_ids, idx), select_frames(data.uv, idx)).foreground_iou *
           static_cast<double>(idx.size());
    batches += static_cast<int>(idx.size());
  }
  return batches > 0 ? sum / batches : 0.0;
}

}  // namespace nvr
