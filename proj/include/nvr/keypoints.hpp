#pragma once

#include <array>
#include <filesystem>
#include <vector>

namespace nvr {

struct KeypointSet {
  std::vector<std::array<double, 2>> points;
  std::vector<bool> visible;

  KeypointSet() = default;
  explicit KeypointSet(std::vector<std::array<double, 2>> pts)
      : points(std::move(pts)), visible(points.size(), true) {}

  int size() const { return static_cast<int>(points.size()); }
  bool operator==(const KeypointSet&) const = default;
};

// keypoints.json: array of T arrays of J [x, y] pairs. Visibility is not
// stored; loaded keypoints are all visible.
void save_keypoints(const std::filesystem::path& path, const std::vector<KeypointSet>& sequence);
std::vector<KeypointSet> load_keypoints(const std::filesystem::path& path);

}  // namespace nvr
