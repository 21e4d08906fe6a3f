#include "nvr/scene_forge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "nvr/errors.hpp"
#include "nvr/io.hpp"

namespace nvr {

namespace {

using scene::kMaxParts;
using scene::PartTexture;
using scene::PoseFrame;
using Vec2 = std::array<double, 2>;

constexpr double kPi = std::numbers::pi;

// Geometry in pixels for a 64 px canvas; scaled with the canvas.
struct PartTemplate {
  int parent;
  bool attach_end;  // attach at the parent's far end (else at its start)
  double rest_angle;
  double length;
  double radius;
  double depth;  // painter's order, larger is nearer
  double swing;  // dance amplitude (radians)
};

// Parents always precede children, so any prefix is a valid puppet.
constexpr std::array<PartTemplate, kMaxParts> kPuppet = {{
    {-1, false, -kPi / 2, 14.0, 4.0, 0.500, 0.12},  // torso
    {0, true, 0.0, 5.0, 3.5, 0.550, 0.30},          // head
    {0, false, kPi + 0.2, 11.0, 2.8, 0.300, 0.45},  // left thigh
    {0, false, kPi - 0.2, 11.0, 2.8, 0.620, 0.45},  // right thigh
    {0, true, kPi + 0.6, 8.0, 2.2, 0.250, 0.90},    // left upper arm
    {0, true, kPi - 0.6, 8.0, 2.2, 0.700, 0.90},    // right upper arm
    {2, true, 0.0, 10.0, 2.2, 0.320, 0.50},         // left shin
    {3, true, 0.0, 10.0, 2.2, 0.640, 0.50},         // right shin
    {4, true, 0.0, 7.0, 1.8, 0.270, 0.80},          // left forearm
    {5, true, 0.0, 7.0, 1.8, 0.720, 0.80},          // right forearm
    {6, true, kPi / 2, 3.5, 1.5, 0.340, 0.25},      // left foot
    {7, true, -kPi / 2, 3.5, 1.5, 0.660, 0.25},     // right foot
    {8, true, 0.0, 2.5, 1.6, 0.290, 0.40},          // left hand
    {9, true, 0.0, 2.5, 1.6, 0.740, 0.40},          // right hand
    {12, true, 0.7, 1.5, 0.8, 0.295, 0.30},         // left thumb
    {13, true, -0.7, 1.5, 0.8, 0.745, 0.30},        // right thumb
    {10, true, 0.0, 1.2, 1.0, 0.345, 0.20},         // left toe
    {11, true, 0.0, 1.2, 1.0, 0.665, 0.20},         // right toe
    {1, true, 0.0, 2.5, 2.5, 0.580, 0.20},          // hat
    {0, false, kPi, 6.0, 1.2, 0.200, 0.40},         // tail
    {4, false, 0.0, 2.5, 2.8, 0.260, 0.00},         // left shoulder pad
    {5, false, 0.0, 2.5, 2.8, 0.710, 0.00},         // right shoulder pad
    {6, false, 0.0, 2.0, 2.6, 0.330, 0.00},         // left knee pad
    {7, false, 0.0, 2.0, 2.6, 0.650, 0.00},         // right knee pad
}};

// Uniform doubles from a standard-specified engine, so sequences are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

double canvas_scale(int height, int width) { return std::min(height, width) / 64.0; }

std::array<double, 2> default_root(int height, int width) { return {width * 0.5, height * 0.55}; }

struct BonePose {
  Vec2 start;
  Vec2 end;
  Vec2 dir;
  double angle;
  double length;
  double radius;
};

std::vector<BonePose> pose_bones(const SceneConfig& config, const PoseFrame& frame) {
  const double scale = canvas_scale(config.height, config.width) * config.puppet_scale;
  std::vector<BonePose> bones(config.n_parts);
  for (int i = 0; i < config.n_parts; ++i) {
    const PartTemplate& t = kPuppet[i];
    BonePose& b = bones[i];
    const double parent_angle = t.parent < 0 ? 0.0 : bones[t.parent].angle;
    b.angle = parent_angle + t.rest_angle + frame.angles[i];
    b.dir = {std::cos(b.angle), std::sin(b.angle)};
    b.length = t.length * scale;
    b.radius = t.radius * scale;
    if (t.parent < 0) {
      b.start = frame.root;
    } else {
      b.start = t.attach_end ? bones[t.parent].end : bones[t.parent].start;
    }
    b.end = {b.start[0] + b.length * b.dir[0], b.start[1] + b.length * b.dir[1]};
  }
  return bones;
}

int start_joint(int part) {
  const PartTemplate& t = kPuppet[part];
  if (t.parent < 0) return 0;
  return t.attach_end ? t.parent + 1 : start_joint(t.parent);
}

// Parts sorted nearest first.
std::vector<int> depth_order(int n_parts) {
  std::vector<int> order(n_parts);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [](int a, int b) { return kPuppet[a].depth > kPuppet[b].depth; });
  return order;
}

struct Hit {
  int part = -1;  // 0-based, -1 = background
  double along = 0.0;
  double across = 0.0;
};

Hit hit_test(const std::vector<BonePose>& bones, const std::vector<int>& order, double x, double y) {
  for (int part : order) {
    const BonePose& b = bones[part];
    const double dx = x - b.start[0];
    const double dy = y - b.start[1];
    const double along = dx * b.dir[0] + dy * b.dir[1];
    const double across = b.dir[0] * dy - b.dir[1] * dx;
    const double closest = std::clamp(along, 0.0, b.length);
    const double da = along - closest;
    if (da * da + across * across <= b.radius * b.radius) return {part, along, across};
  }
  return {};
}

Vec2 part_uv(const BonePose& b, double along, double across) {
  const double u = (along + b.radius) / (b.length + 2.0 * b.radius);
  const double v = (across + b.radius) / (2.0 * b.radius);
  return {std::clamp(u, 0.0, 1.0), std::clamp(v, 0.0, 1.0)};
}

double pattern_value(int pattern, double u, double v) {
  switch (static_cast<scene::Pattern>(pattern)) {
    case scene::Pattern::kSolid:
      return 1.0;
    case scene::Pattern::kStripes:
      return 0.7 + 0.3 * std::sin(2.0 * kPi * 3.0 * u);
    case scene::Pattern::kChecker:
      return 0.7 + 0.3 * std::sin(2.0 * kPi * 2.0 * u) * std::sin(2.0 * kPi * 1.5 * v);
    case scene::Pattern::kGradient:
      return 0.55 + 0.45 * v;
  }
  return 1.0;
}

// Multiplicative pose-dependent shading in [1 - amplitude, 1].
double detail_shading(double amplitude, double u, double joint_angle) {
  return 1.0 - 0.5 * amplitude * (1.0 + std::sin(2.0 * kPi * 2.0 * u + 3.0 * joint_angle));
}

Image render_background(const SceneConfig& config) {
  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ull);
  std::array<double, 6> phase{};
  for (double& p : phase) p = rng.uniform(0.0, 2.0 * kPi);
  Image bg(config.height, config.width, 3);
  const double h = config.height;
  const double w = config.width;
  for (int y = 0; y < config.height; ++y) {
    for (int x = 0; x < config.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double value = 0.0;
        switch (config.background_pattern) {
          case 0:
            value = 0.45 + 0.2 * std::sin(2.0 * kPi * (1.1 + 0.3 * c) * x / w + phase[c]) +
                    0.15 * std::cos(2.0 * kPi * (0.8 + 0.2 * c) * y / h + phase[c + 3]) +
                    0.08 * std::sin(2.0 * kPi * (x + y) / 11.0 + phase[c]);
            break;
          case 1:
            value = 0.5 + 0.3 * std::sin(2.0 * kPi * x / 12.0 + phase[0]) * std::sin(2.0 * kPi * y / 12.0 + phase[1]) +
                    0.1 * (c - 1);
            break;
          default:
            value = 0.4 + 0.1 * c;
            break;
        }
        bg.at(y, x, c) = static_cast<float>(std::clamp(value, 0.02, 0.98));
      }
    }
  }
  return bg;
}

std::array<float, 3> hsv_to_rgb(double h, double s, double v) {
  const double i = std::floor(h * 6.0);
  const double f = h * 6.0 - i;
  const double p = v * (1 - s), q = v * (1 - f * s), t = v * (1 - (1 - f) * s);
  switch (static_cast<int>(i) % 6) {
    case 0: return {float(v), float(t), float(p)};
    case 1: return {float(q), float(v), float(p)};
    case 2: return {float(p), float(v), float(t)};
    case 3: return {float(p), float(q), float(v)};
    case 4: return {float(t), float(p), float(v)};
    default: return {float(v), float(p), float(q)};
  }
}

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("scene config field '" + field + "': " + what);
}

}  // namespace

void SceneConfig::validate() const {
  check(height >= 16, "height", "must be >= 16");
  check(width >= 16, "width", "must be >= 16");
  check(n_parts >= 1 && n_parts <= kMaxParts, "n_parts", "must be in [1, 24]");
  check(n_frames >= 2, "n_frames", "must be >= 2");
  check(static_cast<int>(motion_script.size()) == n_frames, "motion_script", "needs exactly n_frames entries");
  for (const auto& f : motion_script) {
    check(static_cast<int>(f.angles.size()) == n_parts, "motion_script", "each entry needs n_parts angles");
    check(std::isfinite(f.root[0]) && std::isfinite(f.root[1]), "motion_script", "root must be finite");
    for (double a : f.angles) check(std::isfinite(a), "motion_script", "angles must be finite");
  }
  check(static_cast<int>(texture_spec.size()) == n_parts, "texture_spec", "needs exactly n_parts entries");
  for (const auto& t : texture_spec) {
    check(t.pattern >= 0 && t.pattern < scene::kPatternCount, "texture_spec", "unknown pattern id");
    for (float c : t.base_color) check(c >= 0.0f && c <= 1.0f, "texture_spec", "base_color outside [0,1]");
  }
  check(detail_amplitude >= 0.0 && detail_amplitude <= 1.0, "detail_amplitude", "must be in [0,1]");
  check(background_pattern >= 0 && background_pattern <= 2, "background_pattern", "must be 0, 1 or 2");
  check(puppet_scale > 0.0, "puppet_scale", "must be positive");
}

Skeleton puppet_skeleton(const SceneConfig& config) {
  Skeleton s;
  s.n_joints = config.n_parts + 1;
  const double scale = canvas_scale(config.height, config.width) * config.puppet_scale;
  for (int i = 0; i < config.n_parts; ++i) {
    s.bones.push_back({start_joint(i), i + 1});
    s.palette.push_back(hsv_to_rgb(static_cast<double>(i) / kMaxParts, 0.8, 1.0));
    s.radius.push_back(kPuppet[i].radius * scale);
    s.depth.push_back(kPuppet[i].depth);
  }
  return s;
}

std::vector<scene::PartTexture> default_textures(int n_parts, std::uint64_t seed) {
  Rng rng(seed ^ 0xD1B54A32D192ED03ull);
  std::vector<PartTexture> out(n_parts);
  for (int i = 0; i < n_parts; ++i) {
    out[i].pattern = i % scene::kPatternCount;
    for (float& c : out[i].base_color) c = static_cast<float>(rng.uniform(0.3, 0.95));
  }
  return out;
}

std::vector<PoseFrame> dance_motion(int n_parts, int n_frames, int height, int width, std::uint64_t seed,
                                    const DanceMotion& params) {
  Rng rng(seed);
  struct Wave {
    double amp1, freq1, phase1, amp2, freq2, phase2;
  };
  std::vector<Wave> waves(n_parts);
  for (int i = 0; i < n_parts; ++i) {
    const double swing = kPuppet[i].swing * params.amplitude;
    waves[i] = {swing * rng.uniform(0.6, 1.0), params.speed * 2.0 * kPi / rng.uniform(30.0, 70.0),
                rng.uniform(0.0, 2.0 * kPi), swing * rng.uniform(0.1, 0.4),
                params.speed * 2.0 * kPi / rng.uniform(9.0, 25.0), rng.uniform(0.0, 2.0 * kPi)};
  }
  const double sway_freq = params.speed * 2.0 * kPi / rng.uniform(50.0, 90.0);
  const double sway_phase = rng.uniform(0.0, 2.0 * kPi);
  const auto root = default_root(height, width);
  const double scale = canvas_scale(height, width);
  std::vector<PoseFrame> frames(n_frames);
  for (int t = 0; t < n_frames; ++t) {
    PoseFrame& f = frames[t];
    f.angles.resize(n_parts);
    for (int i = 0; i < n_parts; ++i) {
      const Wave& w = waves[i];
      f.angles[i] = w.amp1 * std::sin(w.freq1 * t + w.phase1) + w.amp2 * std::sin(w.freq2 * t + w.phase2);
    }
    f.root = {root[0] + params.sway * scale * std::sin(sway_freq * t + sway_phase), root[1]};
  }
  return frames;
}

std::vector<PoseFrame> translation_motion(int n_parts, int n_frames, int height, int width, Vec2 velocity) {
  const auto root = default_root(height, width);
  std::vector<PoseFrame> frames(n_frames);
  for (int t = 0; t < n_frames; ++t) {
    frames[t].angles.assign(n_parts, 0.0);
    frames[t].root = {root[0] + velocity[0] * t, root[1] + velocity[1] * t};
  }
  return frames;
}

std::vector<PoseFrame> static_motion(int n_parts, int n_frames, int height, int width) {
  return translation_motion(n_parts, n_frames, height, width, {0.0, 0.0});
}

SyntheticSequence generate_sequence(const SceneConfig& config) {
  config.validate();
  const int H = config.height;
  const int W = config.width;
  const int T = config.n_frames;
  const auto order = depth_order(config.n_parts);

  SyntheticSequence seq;
  seq.skeleton = puppet_skeleton(config);
  seq.background = render_background(config);

  std::vector<std::vector<BonePose>> poses(T);
  for (int t = 0; t < T; ++t) {
    poses[t] = pose_bones(config, config.motion_script[t]);
    const auto& bones = poses[t];

    KeypointSet kps;
    kps.points.push_back(config.motion_script[t].root);
    for (const auto& b : bones) kps.points.push_back(b.end);
    for (const auto& p : kps.points) {
      kps.visible.push_back(p[0] >= -0.25 * W && p[0] <= 1.25 * W && p[1] >= -0.25 * H && p[1] <= 1.25 * H);
    }
    seq.keypoints.push_back(std::move(kps));

    Image frame = seq.background;
    LabelMap ids(H, W);
    Image uv(H, W, 2);
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const Hit hit = hit_test(bones, order, x, y);
        if (hit.part < 0) continue;
        const BonePose& b = bones[hit.part];
        const auto [u, v] = part_uv(b, hit.along, hit.across);
        ids.at(y, x) = static_cast<std::uint8_t>(hit.part + 1);
        uv.at(y, x, 0) = static_cast<float>(u);
        uv.at(y, x, 1) = static_cast<float>(v);
        const auto& tex = config.texture_spec[hit.part];
        const double shade = pattern_value(tex.pattern, u, v) *
                             detail_shading(config.detail_amplitude, u, config.motion_script[t].angles[hit.part]);
        for (int c = 0; c < 3; ++c) {
          frame.at(y, x, c) = static_cast<float>(std::clamp(tex.base_color[c] * shade, 0.0, 1.0));
        }
      }
    }
    seq.frames.push_back(std::move(frame));
    seq.part_id.push_back(std::move(ids));
    seq.uv.push_back(std::move(uv));
  }

  // Backward flow: pixel p of frame t came from q in frame t-1, obtained by
  // re-expressing p in its bone's local frame and mapping it through the
  // bone's previous pose.
  for (int t = 1; t < T; ++t) {
    const auto& cur = poses[t];
    const auto& prev = poses[t - 1];
    const LabelMap& ids = seq.part_id[t];
    const LabelMap& prev_ids = seq.part_id[t - 1];
    Image flow(H, W, 2);
    Image conf(H, W, 1);
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const int id = ids.at(y, x);
        double fx = 0.0;
        double fy = 0.0;
        if (id > 0) {
          const BonePose& b = cur[id - 1];
          const BonePose& a = prev[id - 1];
          const double dx = x - b.start[0];
          const double dy = y - b.start[1];
          const double along = dx * b.dir[0] + dy * b.dir[1];
          const double across = b.dir[0] * dy - b.dir[1] * dx;
          // q - p written as a pose difference so an unmoved bone gives
          // exactly zero.
          fx = (a.start[0] - b.start[0]) + along * (a.dir[0] - b.dir[0]) - across * (a.dir[1] - b.dir[1]);
          fy = (a.start[1] - b.start[1]) + along * (a.dir[1] - b.dir[1]) + across * (a.dir[0] - b.dir[0]);
        }
        const float ffx = static_cast<float>(fx);
        const float ffy = static_cast<float>(fy);
        flow.at(y, x, 0) = ffx;
        flow.at(y, x, 1) = ffy;

        // Credible iff every bilinear tap with nonzero weight lies inside the
        // canvas and shows the same part in frame t-1.
        const double qx = x + static_cast<double>(ffx);
        const double qy = y + static_cast<double>(ffy);
        const double x0 = std::floor(qx);
        const double y0 = std::floor(qy);
        const double ax = qx - x0;
        const double ay = qy - y0;
        bool ok = true;
        for (int j = 0; j < 2 && ok; ++j) {
          for (int i = 0; i < 2 && ok; ++i) {
            const double wgt = (i ? ax : 1.0 - ax) * (j ? ay : 1.0 - ay);
            if (wgt <= 0.0) continue;
            const double sx = x0 + i;
            const double sy = y0 + j;
            if (sx < 0 || sy < 0 || sx > W - 1 || sy > H - 1) {
              ok = false;
            } else if (prev_ids.at(static_cast<int>(sy), static_cast<int>(sx)) != id) {
              ok = false;
            }
          }
        }
        conf.at(y, x) = ok ? 1.0f : 0.0f;
      }
    }
    seq.flow.push_back(std::move(flow));
    seq.confidence.push_back(std::move(conf));
  }
  return seq;
}

UnwrapResult brute_force_unwrap(const SyntheticSequence& seq, int resolution, std::span<const int> frame_indices) {
  if (resolution < 1) throw ArgumentError("unwrap resolution must be >= 1");
  UnwrapResult r;
  r.n_parts = seq.n_parts();
  r.resolution = resolution;
  const std::size_t texels = static_cast<std::size_t>(r.n_parts) * resolution * resolution;
  r.color.assign(texels * 3, 0.0);
  r.coverage.assign(texels, 0);

  std::vector<int> all;
  if (frame_indices.empty()) {
    all.resize(seq.n_frames());
    std::iota(all.begin(), all.end(), 0);
    frame_indices = all;
  }
  const double scale = resolution - 1;
  for (int t : frame_indices) {
    const Image& frame = seq.frames.at(t);
    const LabelMap& ids = seq.part_id.at(t);
    const Image& uv = seq.uv.at(t);
    for (int y = 0; y < frame.height; ++y) {
      for (int x = 0; x < frame.width; ++x) {
        const int id = ids.at(y, x);
        if (id == 0) continue;
        const int tx = static_cast<int>(std::lround(uv.at(y, x, 0) * scale));
        const int ty = static_cast<int>(std::lround(uv.at(y, x, 1) * scale));
        const std::size_t k = r.texel(id - 1, ty, tx);
        r.coverage[k] += 1;
        for (int c = 0; c < 3; ++c) r.color[3 * k + c] += frame.at(y, x, c);
      }
    }
  }
  for (std::size_t k = 0; k < texels; ++k) {
    if (r.coverage[k] == 0) continue;
    for (int c = 0; c < 3; ++c) r.color[3 * k + c] /= r.coverage[k];
  }
  return r;
}

// --- JSON ---------------------------------------------------------------

nlohmann::json scene_config_to_json(const SceneConfig& c) {
  nlohmann::json motion = nlohmann::json::array();
  for (const auto& f : c.motion_script) motion.push_back({{"angles", f.angles}, {"root", f.root}});
  nlohmann::json textures = nlohmann::json::array();
  for (const auto& t : c.texture_spec) textures.push_back({{"pattern", t.pattern}, {"base_color", t.base_color}});
  return nlohmann::json{{"height", c.height},
                        {"width", c.width},
                        {"n_parts", c.n_parts},
                        {"n_joints", c.n_joints()},
                        {"n_frames", c.n_frames},
                        {"detail_amplitude", c.detail_amplitude},
                        {"background_pattern", c.background_pattern},
                        {"puppet_scale", c.puppet_scale},
                        {"seed", c.seed},
                        {"texture_spec", textures},
                        {"motion_script", motion}};
}

SceneConfig scene_config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> kKnown = {"height",       "width",          "n_parts",           "n_joints",
                                               "n_frames",     "detail_amplitude", "background_pattern", "puppet_scale",
                                               "seed",         "texture_spec",   "motion_script",     "procedural_motion"};
  if (!j.is_object()) throw ConfigError("scene config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKnown.contains(key)) throw ConfigError("scene config field '" + key + "': unknown key");
  }
  SceneConfig c;
  try {
    c.height = j.value("height", c.height);
    c.width = j.value("width", c.width);
    c.n_parts = j.value("n_parts", c.n_parts);
    c.n_frames = j.at("n_frames").get<int>();
    c.detail_amplitude = j.value("detail_amplitude", c.detail_amplitude);
    c.background_pattern = j.value("background_pattern", c.background_pattern);
    c.puppet_scale = j.value("puppet_scale", c.puppet_scale);
    c.seed = j.value("seed", c.seed);
    if (j.contains("n_joints") && j.at("n_joints").get<int>() != c.n_joints()) {
      throw ConfigError("scene config field 'n_joints': must equal n_parts + 1");
    }
    if (j.contains("texture_spec")) {
      for (const auto& t : j.at("texture_spec")) {
        c.texture_spec.push_back({t.at("pattern").get<int>(), t.at("base_color").get<std::array<float, 3>>()});
      }
    } else {
      c.texture_spec = default_textures(c.n_parts, c.seed);
    }
    if (j.contains("motion_script") && j.contains("procedural_motion")) {
      throw ConfigError("scene config field 'motion_script': conflicts with 'procedural_motion'");
    }
    if (j.contains("motion_script")) {
      for (const auto& f : j.at("motion_script")) {
        c.motion_script.push_back({f.at("angles").get<std::vector<double>>(), f.at("root").get<Vec2>()});
      }
    } else if (j.contains("procedural_motion")) {
      const auto& m = j.at("procedural_motion");
      const std::string kind = m.at("kind").get<std::string>();
      if (kind == "dance") {
        DanceMotion d;
        d.amplitude = m.value("amplitude", d.amplitude);
        d.speed = m.value("speed", d.speed);
        d.sway = m.value("sway", d.sway);
        c.motion_script = dance_motion(c.n_parts, c.n_frames, c.height, c.width, m.value("seed", c.seed), d);
      } else if (kind == "translate") {
        c.motion_script =
            translation_motion(c.n_parts, c.n_frames, c.height, c.width, m.at("velocity").get<Vec2>());
      } else if (kind == "static") {
        c.motion_script = static_motion(c.n_parts, c.n_frames, c.height, c.width);
      } else {
        throw ConfigError("scene config field 'procedural_motion': unknown kind '" + kind + "'");
      }
    } else {
      throw ConfigError("scene config field 'motion_script': missing (or give 'procedural_motion')");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scene config: ") + e.what());
  }
  c.validate();
  return c;
}

SceneConfig load_scene_config(const std::filesystem::path& path) {
  try {
    return scene_config_from_json(nlohmann::json::parse(io::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

// --- dataset directory ---------------------------------------------------

void write_dataset(const std::filesystem::path& dir, const SceneConfig& config, const SyntheticSequence& seq) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (int t = 0; t < seq.n_frames(); ++t) {
    io::write_png_rgb(dir / "frames" / io::frame_name(t, ".png"), seq.frames[t]);
    io::write_png_labels(dir / "partid" / io::frame_name(t, ".png"), seq.part_id[t]);
    io::write_raw_tensor(dir / "uv" / io::frame_name(t, ".bin"), io::kUvMagic, seq.uv[t]);
  }
  // Flow/confidence files are numbered by the later frame of each pair.
  for (int t = 1; t < seq.n_frames(); ++t) {
    io::write_raw_tensor(dir / "flow" / io::frame_name(t, ".bin"), io::kFlowMagic, seq.flow[t - 1]);
    io::write_raw_tensor(dir / "conf" / io::frame_name(t, ".bin"), io::kConfidenceMagic, seq.confidence[t - 1]);
  }
  save_keypoints(dir / "keypoints.json", seq.keypoints);
  io::write_png_rgb(dir / "background.png", seq.background);
  io::write_file(dir / "scene.json", scene_config_to_json(config).dump(1));
  save_skeleton(dir / "skeleton.json", seq.skeleton);
}

Dataset read_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const auto require = [](const fs::path& p) {
    if (!fs::exists(p)) throw DataError("dataset is missing " + p.string());
    return p;
  };
  Dataset d;
  d.config = load_scene_config(require(dir / "scene.json"));
  SyntheticSequence& seq = d.sequence;
  seq.skeleton = load_skeleton(require(dir / "skeleton.json"));
  if (seq.skeleton.n_bones() != d.config.n_parts) throw SchemaError("skeleton.json bone count != scene n_parts");
  seq.keypoints = load_keypoints(require(dir / "keypoints.json"));
  if (static_cast<int>(seq.keypoints.size()) != d.config.n_frames) throw DataError("keypoints.json frame count mismatch");
  seq.background = io::read_png_rgb(require(dir / "background.png"));
  const int T = d.config.n_frames;
  for (int t = 0; t < T; ++t) {
    seq.frames.push_back(io::read_png_rgb(require(dir / "frames" / io::frame_name(t, ".png"))));
    seq.part_id.push_back(io::read_png_labels(require(dir / "partid" / io::frame_name(t, ".png"))));
    seq.uv.push_back(io::read_raw_tensor(require(dir / "uv" / io::frame_name(t, ".bin")), io::kUvMagic));
    if (seq.frames.back().height != d.config.height || seq.frames.back().width != d.config.width) {
      throw DataError("frame " + std::to_string(t) + " size does not match scene.json");
    }
  }
  for (int t = 1; t < T; ++t) {
    seq.flow.push_back(io::read_raw_tensor(require(dir / "flow" / io::frame_name(t, ".bin")), io::kFlowMagic));
    seq.confidence.push_back(
        io::read_raw_tensor(require(dir / "conf" / io::frame_name(t, ".bin")), io::kConfidenceMagic));
  }
  return d;
}

}  // namespace nvr
