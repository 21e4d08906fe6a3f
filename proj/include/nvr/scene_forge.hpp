#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nvr/image.hpp"
#include "nvr/keypoints.hpp"
#include "nvr/skeleton.hpp"

namespace nvr {

// Articulated capsule puppet with analytic part / UV / flow ground truth.
//
// The puppet is a kinematic tree of up to kMaxParts capsules. Part i (1-based
// in label maps) is the capsule around bone i-1. Joint 0 is the root; joint
// b+1 is the far end of bone b, so a scene has n_parts + 1 joints.
//
// UV convention for a capsule of length L and radius r, with `along` measured
// from the bone start and `across` the signed perpendicular offset:
//   u = (along + r) / (L + 2r),  v = (across + r) / (2r).
namespace scene {

inline constexpr int kMaxParts = 24;

enum class Pattern : int { kSolid = 0, kStripes = 1, kChecker = 2, kGradient = 3 };
inline constexpr int kPatternCount = 4;

struct PartTexture {
  int pattern = 0;
  std::array<float, 3> base_color{0.5f, 0.5f, 0.5f};
  bool operator==(const PartTexture&) const = default;
};

// One motion-script entry: relative joint angle offsets (radians, one per
// part, added to the rest pose) and the root position in pixels.
struct PoseFrame {
  std::vector<double> angles;
  std::array<double, 2> root{0.0, 0.0};
  bool operator==(const PoseFrame&) const = default;
};

}  // namespace scene

struct SceneConfig {
  int height = 64;
  int width = 64;
  int n_parts = scene::kMaxParts;
  int n_frames = 2;
  std::vector<scene::PoseFrame> motion_script;
  std::vector<scene::PartTexture> texture_spec;
  double detail_amplitude = 0.0;
  int background_pattern = 0;
  double puppet_scale = 1.0;
  std::uint64_t seed = 0;

  int n_joints() const { return n_parts + 1; }
  // Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const SceneConfig&) const = default;
};

struct SyntheticSequence {
  std::vector<Image> frames;            // T x (H x W x 3) in [0,1]
  std::vector<KeypointSet> keypoints;   // T x J
  std::vector<LabelMap> part_id;        // T, 0 = background
  std::vector<Image> uv;                // T x (H x W x 2)
  std::vector<Image> flow;              // T-1, flow[t-1] maps frame t back to t-1
  std::vector<Image> confidence;        // T-1 x (H x W x 1), values in {0,1}
  Image background;                     // H x W x 3
  Skeleton skeleton;

  int n_frames() const { return static_cast<int>(frames.size()); }
  int height() const { return background.height; }
  int width() const { return background.width; }
  int n_parts() const { return skeleton.n_bones(); }
  bool operator==(const SyntheticSequence&) const = default;
};

// Skeleton (bone list, palette, capsule radii, depth) of the puppet a config
// describes.
Skeleton puppet_skeleton(const SceneConfig& config);

SyntheticSequence generate_sequence(const SceneConfig& config);

// Procedural motion scripts.
struct DanceMotion {
  double amplitude = 1.0;  // scales every joint swing
  double speed = 1.0;      // scales every joint frequency
  double sway = 3.0;       // root horizontal sway in pixels (at 64 px)
};
std::vector<scene::PoseFrame> dance_motion(int n_parts, int n_frames, int height, int width, std::uint64_t seed,
                                           const DanceMotion& params = {});
std::vector<scene::PoseFrame> translation_motion(int n_parts, int n_frames, int height, int width,
                                                 std::array<double, 2> velocity);
std::vector<scene::PoseFrame> static_motion(int n_parts, int n_frames, int height, int width);
std::vector<scene::PartTexture> default_textures(int n_parts, std::uint64_t seed);

// Per-texel mean colour of each part, unwrapped through the ground-truth UV
// assignment. Texel (x, y) of part i collects pixels with
// round(u * (R-1)) == x and round(v * (R-1)) == y.
struct UnwrapResult {
  int n_parts = 0;
  int resolution = 0;
  std::vector<double> color;   // [part][y][x][rgb]
  std::vector<int> coverage;   // [part][y][x] sample counts, 0 = uncovered

  std::size_t texel(int part, int y, int x) const {
    return (static_cast<std::size_t>(part) * resolution + y) * resolution + x;
  }
  bool covered(int part, int y, int x) const { return coverage[texel(part, y, x)] > 0; }
};

// `frame_indices` restricts the frames that contribute; empty means all.
UnwrapResult brute_force_unwrap(const SyntheticSequence& seq, int resolution,
                                std::span<const int> frame_indices = {});

// Scene JSON: explicit "motion_script" or a "procedural_motion" block.
nlohmann::json scene_config_to_json(const SceneConfig& config);
SceneConfig scene_config_from_json(const nlohmann::json& j);
SceneConfig load_scene_config(const std::filesystem::path& path);

// Dataset directory: frames/, partid/, uv/, flow/, conf/, keypoints.json,
// background.png, scene.json, skeleton.json.
void write_dataset(const std::filesystem::path& dir, const SceneConfig& config, const SyntheticSequence& seq);

struct Dataset {
  SceneConfig config;
  SyntheticSequence sequence;
};
// Throws DataError when a required file is missing or inconsistent.
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace nvr
