// nvr: synthesize puppet datasets, train a pose-to-video model, render and
// evaluate it.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nvr/checkpoint.hpp"
#include "nvr/errors.hpp"
#include "nvr/eval_metrics.hpp"
#include "nvr/hybrid_texture.hpp"
#include "nvr/io.hpp"
#include "nvr/keypoints.hpp"
#include "nvr/pipeline.hpp"
#include "nvr/scene_forge.hpp"
#include "nvr/skeleton.hpp"
#include "nvr/train_config.hpp"

namespace fs = std::filesystem;

namespace {

struct Args {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string checkpoint;
  std::string frames;
  std::string background;
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw nvr::ArgumentError(std::string("missing required flag ") + flag);
}

nvr::TrainConfig train_config(const Args& a) {
  require(a.config, "--config");
  nvr::TrainConfig c = nvr::load_train_config(a.config);
  if (a.seed) c.seed = *a.seed;
  return c;
}

// --frames names a dataset directory or a keypoints.json; the skeleton is
// read from skeleton.json beside it.
struct PoseInput {
  std::vector<nvr::KeypointSet> poses;
  nvr::Skeleton skeleton;
};

PoseInput read_poses(const std::string& frames) {
  require(frames, "--frames");
  const fs::path p(frames);
  const fs::path dir = fs::is_directory(p) ? p : p.parent_path();
  const fs::path kps = fs::is_directory(p) ? p / "keypoints.json" : p;
  return {nvr::load_keypoints(kps), nvr::load_skeleton(dir / "skeleton.json")};
}

int cmd_synth(const Args& a) {
  require(a.config, "--config");
  require(a.out, "--out");
  nvr::SceneConfig c = nvr::load_scene_config(a.config);
  if (a.seed) c.seed = *a.seed;
  const nvr::SyntheticSequence seq = nvr::generate_sequence(c);
  nvr::write_dataset(a.out, c, seq);
  std::printf("wrote %d frames to %s\n", seq.n_frames(), a.out.c_str());
  return nvr::kExitOk;
}

int cmd_pretrain(const Args& a) {
  const nvr::TrainConfig c = train_config(a);
  require(a.out, "--out");
  std::vector<nvr::SyntheticSequence> scenes;
  for (const auto& d : c.pretrain_datasets) scenes.push_back(nvr::read_dataset(d).sequence);
  nvr::UvPretrainer trainer(c, scenes);
  if (!a.checkpoint.empty()) trainer.resume(nvr::load_checkpoint(a.checkpoint));

  const fs::path out(a.out);
  fs::create_directories(out);
  std::ofstream log(out / "pretrain_losses.csv", trainer.steps_done() > 0 ? std::ios::app : std::ios::trunc);
  if (trainer.steps_done() == 0) log << "step,loss\n";
  log.precision(9);
  while (trainer.steps_done() < trainer.total_steps()) {
    const double loss = trainer.step();
    log << trainer.steps_done() << ',' << loss << '\n';
    if (trainer.steps_done() % c.log_every == 0) {
      std::printf("pretrain step %lld/%lld loss %.5f\n", static_cast<long long>(trainer.steps_done()),
                  static_cast<long long>(trainer.total_steps()), loss);
    }
    if (c.checkpoint_every > 0 && trainer.steps_done() % c.checkpoint_every == 0) {
      nvr::save_checkpoint(out / "uvgen.ckpt", trainer.checkpoint());
    }
  }
  nvr::save_checkpoint(out / "uvgen.ckpt", trainer.checkpoint());
  const nvr::UvAccuracy acc = trainer.heldout_accuracy();
  const nlohmann::json report{{"part_accuracy", acc.part_accuracy},
                              {"coord_l1", acc.coord_l1},
                              {"foreground_iou", acc.foreground_iou},
                              {"steps", trainer.steps_done()}};
  nvr::io::write_file(out / "pretrain_report.json", report.dump(2));
  std::printf("held-out part accuracy %.4f\n", acc.part_accuracy);
  return nvr::kExitOk;
}

int cmd_train(const Args& a) {
  const nvr::TrainConfig c = train_config(a);
  require(a.out, "--out");
  const fs::path out(a.out);
  fs::create_directories(out);
  const nvr::Dataset data = nvr::read_dataset(c.dataset);

  std::optional<nvr::Checkpoint> start;
  if (!a.checkpoint.empty()) start = nvr::load_checkpoint(a.checkpoint);
  const nvr::Checkpoint* pretrained = start && start->kind == "pretrain" ? &*start : nullptr;
  nvr::Trainer trainer(c, data.sequence, pretrained, nvr::TrainerOptions{out});
  if (start && start->kind == "train") trainer.resume(*start);

  std::vector<nvr::LossRecord> records;
  trainer.run([&](const nvr::LossRecord& r) {
    records.push_back(r);
    if (r.step % c.log_every == 0) {
      std::printf("step %lld/%lld g_total %.5f d_total %.5f temporal %.5f\n", static_cast<long long>(r.step),
                  static_cast<long long>(trainer.total_steps()), r.g_total, r.d_total, r.temporal);
      std::fflush(stdout);
    }
    if (c.checkpoint_every > 0 && r.step % c.checkpoint_every == 0) {
      nvr::save_checkpoint(out / "model.ckpt", trainer.checkpoint());
      nvr::write_loss_log(out / "losses.csv", records);
    }
  });
  nvr::save_checkpoint(out / "model.ckpt", trainer.checkpoint());
  nvr::write_loss_log(out / "losses.csv", records);
  std::printf("wrote %s\n", (out / "model.ckpt").c_str());
  return nvr::kExitOk;
}

std::optional<nvr::Image> background_arg(const Args& a) {
  if (a.background.empty()) return std::nullopt;
  return nvr::io::read_png_rgb(a.background);
}

int render(const Args& a, bool require_background) {
  require(a.checkpoint, "--checkpoint");
  require(a.out, "--out");
  if (require_background) require(a.background, "--background");
  const nvr::Checkpoint ck = nvr::load_checkpoint(a.checkpoint);
  if (!a.config.empty()) nvr::require_compatible(ck, nvr::load_train_config(a.config));
  nvr::RenderModel model = nvr::load_model(ck);
  const PoseInput input = read_poses(a.frames);
  const auto frames = nvr::infer_frames(model, input.poses, input.skeleton, background_arg(a));
  nvr::write_rendering(a.out, frames);
  std::printf("rendered %zu frames to %s\n", frames.size(), a.out.c_str());
  return nvr::kExitOk;
}

int cmd_eval(const Args& a) {
  require(a.checkpoint, "--checkpoint");
  require(a.out, "--out");
  const nvr::Checkpoint ck = nvr::load_checkpoint(a.checkpoint);
  nvr::TrainConfig c = nvr::checkpoint_config(ck);
  if (!a.config.empty()) {
    c = train_config(a);
    nvr::require_compatible(ck, c);
  } else if (a.seed) {
    c.seed = *a.seed;
  }
  nvr::RenderModel model = nvr::load_model(ck);
  const nvr::Dataset data = nvr::read_dataset(c.dataset);
  const nvr::DataSplit split =
      nvr::make_split(data.sequence.n_frames(), c.validation_block, c.validation_ratio, c.seed);
  const nvr::Evaluation ev = nvr::evaluate_model(model, data.sequence, split, c.robust_m);
  const fs::path out(a.out);
  nvr::write_eval_report(out / "eval_report.json", out / "eval_frames.csv", ev.report);
  std::printf("ssim %.4f psnr %.2f robust ssim %.4f robust psnr %.2f temporal %.5f\n", ev.report.ssim,
              ev.report.psnr, ev.report.robust_ssim, ev.report.robust_psnr, ev.report.temporal_error);
  return nvr::kExitOk;
}

int cmd_export_texture(const Args& a) {
  require(a.checkpoint, "--checkpoint");
  require(a.out, "--out");
  nvr::RenderModel model = nvr::load_model(nvr::load_checkpoint(a.checkpoint));
  const fs::path out(a.out);
  nvr::save_texture(out / "texture.htx", model.texture);
  nvr::export_texture_previews(out, model.texture);
  nvr::io::write_png_rgb(out / "background.png", model.background.to_image());
  std::printf("exported %d part textures to %s\n", model.texture.n_parts(), a.out.c_str());
  return nvr::kExitOk;
}

int run(const std::string& command, const Args& a) {
  if (command == "synth") return cmd_synth(a);
  if (command == "pretrain-uv") return cmd_pretrain(a);
  if (command == "train") return cmd_train(a);
  if (command == "infer") return render(a, false);
  if (command == "replace-bg") return render(a, true);
  if (command == "eval") return cmd_eval(a);
  if (command == "export-texture") return cmd_export_texture(a);
  throw nvr::ArgumentError("unknown command " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural video rendering for pose transfer"};
  app.require_subcommand(1);
  Args args;
  std::uint64_t seed = 0;
  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"synth", "emit a synthetic dataset from a scene JSON"},
      {"pretrain-uv", "pretrain the UV generator on several scenes"},
      {"train", "joint training on one scene"},
      {"infer", "render a pose sequence"},
      {"eval", "self-transfer evaluation on the validation split"},
      {"export-texture", "write texture atlas, previews and background"},
      {"replace-bg", "render a pose sequence over a new background"},
  };
  for (const auto& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", args.config, "config JSON");
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--out", args.out, "output path");
    sub->add_option("--checkpoint", args.checkpoint, "checkpoint file");
    sub->add_option("--frames", args.frames, "dataset directory or keypoints.json");
    sub->add_option("--background", args.background, "replacement background PNG");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return nvr::kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed") > 0) args.seed = seed;

  try {
    return run(sub->get_name(), args);
  } catch (const nvr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return nvr::kExitConfig;
  } catch (const nvr::ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return nvr::kExitConfig;
  } catch (const nvr::VersionError& e) {
    std::cerr << "version error: " << e.what() << '\n';
    return nvr::kExitConfig;
  } catch (const nvr::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return nvr::kExitNumerical;
  } catch (const nvr::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return nvr::kExitData;
  } catch (const nvr::ShapeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return nvr::kExitData;
  } catch (const nvr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nvr::kExitData;
  }
}
