// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only N[,N...]] [--steps K] [--pretrain-steps K]
//
// Criteria 5-9 share one UV pretraining and five joint-training runs on the
// same 64x64, 8-part, 300-frame scene (full model plus four ablations).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nvr/background.hpp"
#include "nvr/checkpoint.hpp"
#include "nvr/d2g_net.hpp"
#include "nvr/eval_metrics.hpp"
#include "nvr/flow_warp.hpp"
#include "nvr/hybrid_texture.hpp"
#include "nvr/objectives.hpp"
#include "nvr/pipeline.hpp"
#include "nvr/pose_labels.hpp"
#include "nvr/scene_forge.hpp"
#include "nvr/tensor_convert.hpp"
#include "nvr/texture_mapping.hpp"
#include "nvr/uv_generator.hpp"
#include "support.hpp"

using namespace nvr;

namespace {

const auto kF64 = torch::TensorOptions().dtype(torch::kFloat64);

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects failed sub-checks of one criterion.
struct Verdict {
  std::vector<std::string> failures;
  std::ostringstream notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  bool passed() const { return failures.empty(); }
};

void report(int id, const std::string& title, const Verdict& v) {
  std::printf("criterion %d %s: %s", id, v.passed() ? "PASS" : "FAIL", title.c_str());
  const std::string notes = v.notes.str();
  if (!notes.empty()) std::printf(" [%s]", notes.c_str());
  for (const auto& f : v.failures) std::printf("\n    failed: %s", f.c_str());
  std::printf("\n");
  std::fflush(stdout);
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

// ---------------------------------------------------------------- 1

Verdict differentiability() {
  Verdict v;
  const auto start = Clock::now();
  torch::manual_seed(101);
  double worst_kernel = 0, worst_net = 0;
  for (int trial = 0; trial < 3; ++trial) {
    const auto tex = torch::rand({3, 5, 5}, kF64);
    const auto coords = torch::rand({4, 4, 2}, kF64) * 0.9 + 0.05;
    const auto w = torch::rand({3, 4, 4}, kF64);
    worst_kernel = std::max(worst_kernel, test::gradient_error(
                                              [&](const torch::Tensor& t) { return (sample_part(t, coords) * w).sum(); }, tex));
    worst_kernel = std::max(worst_kernel, test::gradient_error(
                                              [&](const torch::Tensor& c) { return (sample_part(tex, c) * w).sum(); }, coords));

    const auto samples = torch::rand({1, 3, 4, 4, 4}, kF64);
    const auto logits = torch::randn({1, 4, 4, 4}, kF64);
    const auto wb = torch::rand({1, 4, 4, 4}, kF64);
    worst_kernel = std::max(worst_kernel, test::gradient_error(
                                              [&](const torch::Tensor& p) { return (blend_parts(torch::softmax(p, 1), samples) * wb).sum(); },
                                              logits));
    worst_kernel = std::max(worst_kernel, test::gradient_error(
                                              [&](const torch::Tensor& s) { return (blend_parts(torch::softmax(logits, 1), s) * wb).sum(); },
                                              samples));

    const auto img = torch::rand({1, 3, 6, 6}, kF64);
    const auto flow = torch::randn({1, 2, 6, 6}, kF64) * 1.5;
    const auto ww = torch::rand({1, 3, 6, 6}, kF64);
    worst_kernel = std::max(worst_kernel,
                            test::gradient_error([&](const torch::Tensor& x) { return (warp(x, flow) * ww).sum(); }, img));
  }

  D2GOptions d;
  d.base_width = 8;
  d.n_down = 1;
  d.n_res = 1;
  D2GNet net(d);
  net->to(torch::kFloat64);
  const auto feature = torch::randn({1, 18, 8, 8}, kF64);
  const auto pose = torch::rand({1, 6, 8, 8}, kF64);
  const auto wd = torch::rand({1, 3, 8, 8}, kF64);
  worst_net = std::max(worst_net, test::gradient_error(
                                      [&](const torch::Tensor& f) { return (net->forward(f, pose) * wd).sum(); }, feature));
  worst_net = std::max(worst_net, test::gradient_error(
                                      [&](const torch::Tensor& p) { return (net->forward(feature, p) * wd).sum(); }, pose));

  UvGeneratorOptions u;
  u.n_parts = 3;
  u.base_width = 8;
  u.n_down = 1;
  u.n_res = 1;
  UvGenerator gen(u);
  gen->to(torch::kFloat64);
  const auto x = torch::rand({1, 6, 8, 8}, kF64);
  const auto ids = torch::randint(0, 4, {1, 8, 8}, torch::kInt64);
  const auto uv = torch::rand({1, 8, 8, 2}, kF64);
  auto loss = [&] { return uv_pretrain_loss(gen->forward(x), ids, uv).total; };
  int checked = 0;
  for (auto& p : gen->parameters()) {
    if (p.dim() < 4 || checked >= 3) continue;
    worst_net = std::max(worst_net, test::parameter_gradient_error(loss, p, 12));
    ++checked;
  }

  const double elapsed = seconds_since(start);
  v.expect(worst_kernel < 1e-4, "kernel relative gradient error " + std::to_string(worst_kernel) + " >= 1e-4");
  v.expect(worst_net < 1e-3, "network relative gradient error " + std::to_string(worst_net) + " >= 1e-3");
  v.expect(elapsed < 60, "took " + fmt(elapsed, 1) + " s");
  v.notes << "kernel err " << worst_kernel << ", network err " << worst_net << ", " << fmt(elapsed, 1) << " s";
  return v;
}

// ---------------------------------------------------------------- 2

Verdict normalization() {
  Verdict v;
  const auto start = Clock::now();
  torch::manual_seed(202);
  UvGeneratorOptions u;
  u.n_parts = 8;
  u.base_width = 8;
  u.n_down = 1;
  u.n_res = 1;
  UvGenerator gen(u);
  torch::NoGradGuard no_grad;
  double worst = 0;
  bool coords_ok = true;
  for (int i = 0; i < 100; ++i) {
    const auto pred = gen->forward(torch::rand({1, 6, 16, 16}) * 4 - 2);
    worst = std::max(worst, pred.part_probs.sum(1).sub(1).abs().max().item<double>());
    coords_ok = coords_ok && pred.coords.min().item<float>() >= 0 && pred.coords.max().item<float>() <= 1;
  }
  v.expect(worst <= 1e-5, "partition of unity off by " + std::to_string(worst));
  v.expect(coords_ok, "UV coordinates left [0,1]");

  // Composite range preservation.
  bool range_ok = true;
  for (int i = 0; i < 20; ++i) {
    const auto out = composite(torch::rand({2, 3, 8, 8}), torch::rand({3, 8, 8}), torch::rand({2, 1, 8, 8}));
    range_ok = range_ok && out.min().item<float>() >= 0 && out.max().item<float>() <= 1;
  }
  v.expect(range_ok, "composite left [0,1]");

  // Blend linearity in P and one-hot reduction.
  const auto samples = torch::rand({1, 4, 5, 6, 6}, kF64);
  const auto p1 = torch::softmax(torch::randn({1, 5, 6, 6}, kF64), 1);
  const auto p2 = torch::softmax(torch::randn({1, 5, 6, 6}, kF64), 1);
  const auto lin = blend_parts(0.25 * p1 + 0.75 * p2, samples) -
                   (0.25 * blend_parts(p1, samples) + 0.75 * blend_parts(p2, samples));
  v.expect(lin.abs().max().item<double>() < 1e-12, "blend is not linear in P");
  auto onehot = torch::zeros({1, 5, 6, 6}, kF64);
  onehot[0][3].fill_(1);
  v.expect(torch::allclose(blend_parts(onehot, samples), samples.select(1, 2)), "one-hot blend differs from the part");

  const double elapsed = seconds_since(start);
  v.expect(elapsed < 30, "took " + fmt(elapsed, 1) + " s");
  v.notes << "max |sum P - 1| " << worst << ", " << fmt(elapsed, 1) << " s";
  return v;
}

// ---------------------------------------------------------------- 3

std::vector<int> exhaustive_challenging(const std::vector<KeypointSet>& val, const std::vector<KeypointSet>& train,
                                        int m) {
  std::vector<std::pair<double, int>> d;
  for (std::size_t i = 0; i < val.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : train) {
      double s = 0;
      for (int j = 0; j < val[i].size(); ++j) {
        s += std::pow(val[i].points[j][0] - t.points[j][0], 2) + std::pow(val[i].points[j][1] - t.points[j][1], 2);
      }
      best = std::min(best, std::sqrt(s));
    }
    d.push_back({-best, static_cast<int>(i)});
  }
  std::sort(d.begin(), d.end());
  std::vector<int> out;
  for (int k = 0; k < m; ++k) out.push_back(d[k].second);
  return out;
}

Verdict oracles() {
  Verdict v;
  const auto start = Clock::now();

  // Texture initialisation against the brute-force unwrap.
  const auto seq = generate_sequence(test::dance_scene(6, 12, 0.5, 303));
  const int R = 16;
  const auto init = initialize_from_video(seq, R);
  const auto oracle = brute_force_unwrap(seq, R);
  const auto values = init.texture.values().to(torch::kFloat64);
  auto a = values.accessor<double, 4>();
  double tex_err = 0;
  for (int p = 0; p < 6; ++p) {
    for (int y = 0; y < R; ++y) {
      for (int x = 0; x < R; ++x) {
        if (!oracle.covered(p, y, x)) continue;
        for (int c = 0; c < 3; ++c) tex_err = std::max(tex_err, std::abs(a[p][c][y][x] - oracle.color[3 * oracle.texel(p, y, x) + c]));
      }
    }
  }
  v.expect(tex_err <= 1e-6, "texture init differs from unwrap by " + std::to_string(tex_err));

  // Challenging-pose selection against the exhaustive search.
  std::mt19937_64 rng(304);
  std::vector<KeypointSet> val, train;
  for (int i = 0; i < 30; ++i) val.push_back(test::random_pose(9, rng));
  for (int i = 0; i < 200; ++i) train.push_back(test::random_pose(9, rng));
  bool sel_ok = true;
  for (int m : {1, 10, 30}) sel_ok = sel_ok && select_challenging(val, train, m) == exhaustive_challenging(val, train, m);
  v.expect(sel_ok, "select_challenging differs from exhaustive search");

  // Temporal error against pairwise recomputation.
  std::vector<Image> frames, flows, conf;
  for (int t = 0; t < 6; ++t) frames.push_back(test::random_image(16, 16, 3, 310 + t));
  for (int t = 0; t < 5; ++t) {
    flows.push_back(test::random_image(16, 16, 2, 320 + t, -2.0f, 2.0f));
    conf.push_back(test::random_image(16, 16, 1, 330 + t));
  }
  double pairwise = 0;
  for (int t = 1; t < 6; ++t) {
    const auto warped = warp_planar(frames[t - 1], flows[t - 1]);
    double s = 0;
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        double d = 0;
        for (int c = 0; c < 3; ++c) d += std::abs(double(frames[t].at(y, x, c)) - warped[c * 256 + y * 16 + x]);
        s += conf[t - 1].at(y, x) * d;
      }
    }
    pairwise += s / 256;
  }
  pairwise /= 5;
  const double te_err = std::abs(temporal_error(frames, flows, conf) - pairwise);
  v.expect(te_err <= 1e-9, "temporal_error differs by " + std::to_string(te_err));

  // Total objective against term-by-term recomputation.
  torch::manual_seed(340);
  PatchDiscriminator disc(PatchDiscriminatorOptions{6, 3, 8, 3});
  disc->to(torch::kFloat64);
  FeatureExtractor features;
  LossWeights w;
  FrameTerms f[2];
  for (auto& fr : f) {
    fr.pose = torch::rand({1, 6, 32, 32}, kF64);
    fr.synthesized = torch::rand({1, 3, 32, 32}, kF64);
    fr.synthesized_static = torch::rand({1, 3, 32, 32}, kF64);
    fr.real = torch::rand({1, 3, 32, 32}, kF64);
  }
  const auto flow = torch::randn({1, 2, 32, 32}, kF64);
  const auto c = torch::rand({1, 1, 32, 32}, kF64);
  const auto terms = total_objective(disc, features, f[0], f[1], flow, c, w);
  double g = 0, d = 0;
  for (const auto& fr : f) {
    const auto real_logits = disc->forward(fr.pose, fr.real);
    const auto fake_logits = disc->forward(fr.pose, fr.synthesized);
    auto bce = [](const torch::Tensor& z, double y) {
      const auto p = torch::sigmoid(z);
      return (-(y * p.log() + (1 - y) * (1 - p).log())).mean().item<double>();
    };
    d += bce(real_logits, 1) + bce(fake_logits, 0);
    g += bce(fake_logits, 1);
    for (const auto& img : {fr.synthesized, fr.synthesized_static}) {
      double sup = w.l2 * std::sqrt((img - fr.real).pow(2).mean().item<double>());
      const auto fs = features->forward(img);
      const auto fr_feat = features->forward(fr.real);
      for (std::size_t l = 0; l < fs.size(); ++l) sup += w.feature * (fs[l] - fr_feat[l]).abs().mean().item<double>();
      g += sup;
    }
  }
  g += w.temporal * ((f[1].synthesized - warp(f[0].synthesized, flow)).abs().sum(1, true) * c).mean().item<double>();
  const double obj_err = std::max(std::abs(terms.g_total.item<double>() - g), std::abs(terms.d_total.item<double>() - d));
  v.expect(obj_err <= 1e-6, "total_objective differs by " + std::to_string(obj_err));

  const double elapsed = seconds_since(start);
  v.expect(elapsed < 60, "took " + fmt(elapsed, 1) + " s");
  v.notes << "texture " << tex_err << ", temporal " << te_err << ", objective " << obj_err << ", " << fmt(elapsed, 1)
          << " s";
  return v;
}

// ---------------------------------------------------------------- 4

Verdict warp_exactness() {
  Verdict v;
  const auto start = Clock::now();
  torch::manual_seed(404);
  const auto img = torch::rand({2, 3, 9, 11}, kF64);
  v.expect(torch::equal(warp(img, torch::zeros({2, 2, 9, 11}, kF64)), img), "zero flow is not the identity");

  auto shift = torch::zeros({2, 2, 9, 11}, kF64);
  shift.select(1, 0).fill_(3.0);
  shift.select(1, 1).fill_(-2.0);
  const auto out = warp(img, shift);
  v.expect(torch::equal(out.narrow(2, 2, 7).narrow(3, 0, 8), img.narrow(2, 0, 7).narrow(3, 3, 8)),
           "integer shift is not exact");

  double worst = 0;
  int pixels = 0;
  for (const std::array<double, 2> vel : {std::array<double, 2>{2, -1}, {-3, 0}, {0, 2}, {1, 1}}) {
    SceneConfig c = test::static_scene(8, 5, 48);
    c.motion_script = translation_motion(8, 5, 48, 48, vel);
    c.background_pattern = 2;
    const auto seq = generate_sequence(c);
    for (int t = 1; t < seq.n_frames(); ++t) {
      const Image warped = warp(seq.frames[t - 1], seq.flow[t - 1]);
      for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 48; ++x) {
          if (seq.confidence[t - 1].at(y, x) != 1.0f) continue;
          ++pixels;
          for (int ch = 0; ch < 3; ++ch) {
            worst = std::max(worst, double(std::abs(warped.at(y, x, ch) - seq.frames[t].at(y, x, ch))));
          }
        }
      }
    }
  }
  v.expect(pixels > 0, "no confidence-1 pixels");
  v.expect(worst <= 1e-6, "rigid-motion warp error " + std::to_string(worst));
  const double elapsed = seconds_since(start);
  v.expect(elapsed < 30, "took " + fmt(elapsed, 1) + " s");
  v.notes << "rigid-motion max error " << worst << " over " << pixels << " pixels, " << fmt(elapsed, 1) << " s";
  return v;
}

// ---------------------------------------------------------------- 5-10

struct RunResult {
  std::string name;
  std::vector<LossRecord> records;
  EvalReport eval;
  double iou = 0;
  double bg_init_psnr = 0;
  double bg_refined_psnr = 0;
  double seconds = 0;
  std::optional<Checkpoint> checkpoint;
};

SceneConfig acceptance_scene(std::uint64_t seed) {
  SceneConfig c;
  c.height = 64;
  c.width = 64;
  c.n_parts = 8;
  c.n_frames = 300;
  c.detail_amplitude = 0.5;
  c.background_pattern = 1;
  c.seed = seed;
  c.motion_script = dance_motion(8, 300, 64, 64, seed);
  c.texture_spec = default_textures(8, seed);
  return c;
}

TrainConfig acceptance_config(int steps, int pretrain_steps) {
  TrainConfig c;
  c.n_parts = 8;
  c.max_steps = steps;
  c.pretrain_max_steps = pretrain_steps;
  c.seed = 1;
  // 64x64 frames: one downsampling keeps limbs a few pixels wide in the trunk.
  c.n_down = 1;
  return c;
}

RunResult train_variant(const std::string& name, const TrainConfig& config, const SyntheticSequence& seq,
                        const Checkpoint& pretrained, bool keep_checkpoint) {
  const auto start = Clock::now();
  RunResult r;
  r.name = name;
  Trainer trainer(config, seq, &pretrained);
  r.records = trainer.run([&](const LossRecord& rec) {
    if (rec.step % 250 == 0) {
      std::fprintf(stderr, "  [%s] step %lld g_total %.4f\n", name.c_str(), static_cast<long long>(rec.step),
                   rec.g_total);
    }
  });
  const auto ev = evaluate_model(trainer.model(), seq, trainer.split(), config.robust_m);
  r.eval = ev.report;
  r.iou = foreground_argmax_iou(trainer.model(), trainer.data(), trainer.split().validation);
  r.bg_init_psnr = psnr(trainer.background_init().image, seq.background);
  r.bg_refined_psnr = psnr(trainer.model().background.to_image(), seq.background);
  if (keep_checkpoint) r.checkpoint = trainer.checkpoint();
  r.seconds = seconds_since(start);
  std::fprintf(stderr, "  [%s] ssim %.4f psnr %.2f temporal %.6f iou %.4f bg %.2f -> %.2f (%.0f s)\n", name.c_str(),
               r.eval.ssim, r.eval.psnr, r.eval.temporal_error, r.iou, r.bg_init_psnr, r.bg_refined_psnr, r.seconds);
  return r;
}

double mean_g(const std::vector<LossRecord>& records, std::size_t begin, std::size_t end) {
  double s = 0;
  for (std::size_t i = begin; i < end; ++i) s += records[i].g_total;
  return s / static_cast<double>(end - begin);
}

struct Options {
  std::set<int> only;
  int steps = 1000;
  int pretrain_steps = 400;
};

Options parse(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto value = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value for %s\n", arg.c_str());
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--only") {
      std::stringstream ss(value());
      std::string item;
      while (std::getline(ss, item, ',')) o.only.insert(std::stoi(item));
    } else if (arg == "--steps") {
      o.steps = std::stoi(value());
    } else if (arg == "--pretrain-steps") {
      o.pretrain_steps = std::stoi(value());
    } else {
      std::fprintf(stderr, "unknown argument %s\n", arg.c_str());
      std::exit(2);
    }
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const Options opt = parse(argc, argv);
  auto wanted = [&](int id) { return opt.only.empty() || opt.only.count(id) > 0; };
  int failed = 0;
  auto run = [&](int id, const std::string& title, const std::function<Verdict()>& body) {
    if (!wanted(id)) return;
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    report(id, title, v);
    failed += v.passed() ? 0 : 1;
  };

  run(1, "differentiability", differentiability);
  run(2, "normalization and partition", normalization);
  run(3, "oracle equivalence", oracles);
  run(4, "warp exactness", warp_exactness);

  const bool need_training = wanted(5) || wanted(6) || wanted(7) || wanted(8) || wanted(9) || wanted(10);
  if (need_training) {
    const auto start = Clock::now();
    const TrainConfig config = acceptance_config(opt.steps, opt.pretrain_steps);
    const SyntheticSequence seq = generate_sequence(acceptance_scene(1));
    std::vector<SyntheticSequence> pretrain_scenes{generate_sequence(acceptance_scene(2)),
                                                   generate_sequence(acceptance_scene(3))};
    std::optional<Checkpoint> pretrained;
    std::map<std::string, RunResult> runs;
    std::string setup_error;
    try {
      UvPretrainer pre(config, pretrain_scenes);
      while (pre.steps_done() < pre.total_steps()) pre.step();
      const auto acc = pre.heldout_accuracy();
      std::fprintf(stderr, "  pretraining: %lld steps, held-out part accuracy %.4f\n",
                   static_cast<long long>(pre.steps_done()), acc.part_accuracy);
      pretrained = pre.checkpoint();
      pretrain_scenes.clear();

      runs["full"] = train_variant("full", config, seq, *pretrained, true);
      if (wanted(6)) {
        TrainConfig c = config;
        c.weights.temporal = 0.0;
        runs["no_temporal"] = train_variant("lambda_temp=0", c, seq, *pretrained, false);
      }
      if (wanted(7)) {
        TrainConfig c = config;
        c.use_d2g = false;
        runs["no_d2g"] = train_variant("w/o D2G", c, seq, *pretrained, false);
        c = config;
        c.pose_conditioned = false;
        runs["no_condition"] = train_variant("w/o condition", c, seq, *pretrained, false);
      }
      if (wanted(8)) {
        TrainConfig c = config;
        c.regular_loss = false;
        runs["no_regular"] = train_variant("w/o regular", c, seq, *pretrained, false);
      }
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    const double total_seconds = seconds_since(start);

    auto with_runs = [&](const std::vector<std::string>& names, const std::function<Verdict()>& body) {
      return [&, names, body]() {
        Verdict v;
        if (!setup_error.empty()) {
          v.expect(false, "training failed: " + setup_error);
          return v;
        }
        for (const auto& n : names) {
          if (!runs.count(n)) v.expect(false, "missing run " + n);
        }
        if (!v.passed()) return v;
        return body();
      };
    };

    run(5, "end-to-end training sanity", with_runs({"full"}, [&] {
          Verdict v;
          const auto& r = runs["full"];
          const std::size_t n = r.records.size();
          const double early = mean_g(r.records, 0, std::min<std::size_t>(10, n));
          const double late = mean_g(r.records, n - std::min<std::size_t>(50, n), n);
          v.expect(late <= 0.5 * early, "g_total fell from " + fmt(early) + " to only " + fmt(late));
          v.expect(r.eval.ssim >= 0.85, "validation SSIM " + fmt(r.eval.ssim));
          v.expect(r.eval.psnr >= 25.0, "validation PSNR " + fmt(r.eval.psnr, 2));
          v.expect(total_seconds <= 3 * 3600, "training took " + fmt(total_seconds, 0) + " s");
          v.notes << "g_total " << fmt(early) << " -> " << fmt(late) << " (" << fmt(100 * (1 - late / early), 1)
                  << "% drop), SSIM " << fmt(r.eval.ssim) << ", PSNR " << fmt(r.eval.psnr, 2) << " dB, "
                  << n << " steps, " << fmt(total_seconds, 0) << " s for all runs";
          return v;
        }));

    run(6, "temporal ablation direction", with_runs({"full", "no_temporal"}, [&] {
          Verdict v;
          const double with = runs["full"].eval.temporal_error;
          const double without = runs["no_temporal"].eval.temporal_error;
          v.expect(with < without, "temporal error with lambda_temp=100 is not below lambda_temp=0");
          v.notes << "temporal error lambda_temp=100: " << fmt(with, 6) << ", lambda_temp=0: " << fmt(without, 6);
          return v;
        }));

    run(7, "detail network ablation direction", with_runs({"full", "no_d2g", "no_condition"}, [&] {
          Verdict v;
          const double full = runs["full"].eval.psnr;
          const double static_tex = runs["no_d2g"].eval.psnr;
          const double uncond = runs["no_condition"].eval.psnr;
          v.expect(full >= static_tex, "full PSNR below the static-texture variant");
          v.expect(full >= uncond, "full PSNR below the unconditioned variant");
          v.notes << "PSNR full " << fmt(full, 2) << ", w/o D2G " << fmt(static_tex, 2) << ", w/o condition "
                  << fmt(uncond, 2);
          return v;
        }));

    run(8, "regular loss direction", with_runs({"full", "no_regular"}, [&] {
          Verdict v;
          const double with = runs["full"].iou;
          const double without = runs["no_regular"].iou;
          v.expect(with >= without, "foreground IoU with the regular loss is below the run without it");
          v.notes << "argmax foreground IoU with " << fmt(with) << ", without " << fmt(without);
          return v;
        }));

    run(9, "background recovery", with_runs({"full"}, [&] {
          Verdict v;
          const auto& r = runs["full"];
          v.expect(r.bg_refined_psnr >= 25.0, "refined background PSNR " + fmt(r.bg_refined_psnr, 2));
          v.expect(r.bg_refined_psnr >= r.bg_init_psnr, "refined background is worse than its initialisation");
          v.notes << "background PSNR init " << fmt(r.bg_init_psnr, 2) << " dB, refined " << fmt(r.bg_refined_psnr, 2)
                  << " dB";
          return v;
        }));

    run(10, "inference path", with_runs({"full"}, [&] {
          Verdict v;
          RenderModel a = load_model(*runs["full"].checkpoint);
          RenderModel b = load_model(deserialize_checkpoint(serialize_checkpoint(*runs["full"].checkpoint)));
          reset_warp_invocations();
          const auto first = infer_frames(a, seq.keypoints, seq.skeleton);
          const auto again = infer_frames(a, seq.keypoints, seq.skeleton);
          const auto reloaded = infer_frames(b, seq.keypoints, seq.skeleton);
          const auto calls = warp_invocations();
          v.expect(calls == 0, std::to_string(calls) + " warp invocations during inference");
          bool same = first.size() == seq.keypoints.size() && first.size() == again.size() &&
                      first.size() == reloaded.size();
          for (std::size_t i = 0; same && i < first.size(); ++i) {
            same = first[i].data == again[i].data && first[i].data == reloaded[i].data;
          }
          v.expect(same, "repeated inference is not bit-identical");
          v.notes << first.size() << " frames, " << calls << " warp calls, bit-identical across repeats and reload";
          return v;
        }));
  }

  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
