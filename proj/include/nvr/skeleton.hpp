#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "json.hpp"

namespace nvr {

// Bone list of a dataset. Bone b connects joints bones[b][0] -> bones[b][1]
// and is the skeleton of body part b + 1 (part 0 is background). The
// per-bone radius and depth describe the capsule the puppet draws around the
// bone; pose_labels uses them as its geometry feature source.
struct Skeleton {
  int n_joints = 0;
  std::vector<std::array<int, 2>> bones;
  std::vector<std::array<float, 3>> palette;
  std::vector<double> radius;
  std::vector<double> depth;

  int n_bones() const { return static_cast<int>(bones.size()); }
  // Throws SchemaError when the arrays disagree or reference missing joints.
  void validate() const;
  bool operator==(const Skeleton&) const = default;
};

nlohmann::json skeleton_to_json(const Skeleton& skeleton);
Skeleton skeleton_from_json(const nlohmann::json& j);
void save_skeleton(const std::filesystem::path& path, const Skeleton& skeleton);
Skeleton load_skeleton(const std::filesystem::path& path);

}  // namespace nvr
