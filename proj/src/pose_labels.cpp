#include "nvr/pose_labels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nvr/errors.hpp"

namespace nvr {

namespace {

// Full coverage within half a pixel of the bone, linear falloff to zero at
// 1.5 px.
constexpr double kLineInner = 0.5;

double segment_distance(double px, double py, const std::array<double, 2>& a, const std::array<double, 2>& b) {
  const double vx = b[0] - a[0];
  const double vy = b[1] - a[1];
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - a[0]) * vx + (py - a[1]) * vy) / len2, 0.0, 1.0);
  const double dx = px - (a[0] + t * vx);
  const double dy = py - (a[1] + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

PoseLabelImage rasterize_pose(const KeypointSet& keypoints, const Skeleton& skeleton, int height, int width) {
  if (keypoints.size() != skeleton.n_joints) {
    throw SchemaError("keypoint count " + std::to_string(keypoints.size()) + " does not match skeleton joint count " +
                      std::to_string(skeleton.n_joints));
  }
  if (keypoints.visible.size() != keypoints.points.size()) throw SchemaError("keypoint visibility length mismatch");
  PoseLabelImage label{Image(height, width, PoseLabelImage::kChannels)};
  Image& img = label.data;

  const int n_bones = skeleton.n_bones();
  std::vector<int> order(n_bones);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return skeleton.depth[a] > skeleton.depth[b]; });
  // Rank 1 = farthest part, rank n = nearest.
  std::vector<double> rank(n_bones);
  for (int k = 0; k < n_bones; ++k) rank[order[k]] = static_cast<double>(n_bones - k) / n_bones;

  for (int b : order) {
    const auto [ja, jb] = skeleton.bones[b];
    if (!keypoints.visible[ja] || !keypoints.visible[jb]) continue;
    const auto& pa = keypoints.points[ja];
    const auto& pb = keypoints.points[jb];
    const double dx = pb[0] - pa[0];
    const double dy = pb[1] - pa[1];
    const double len = std::sqrt(dx * dx + dy * dy);
    const double cos_a = len > 0.0 ? dx / len : 1.0;
    const double sin_a = len > 0.0 ? dy / len : 0.0;
    const double r = skeleton.radius[b];

    const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(pa[0], pb[0]) - r - 2)));
    const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(std::max(pa[0], pb[0]) + r + 2)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(pa[1], pb[1]) - r - 2)));
    const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(std::max(pa[1], pb[1]) + r + 2)));
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const double d = segment_distance(x, y, pa, pb);
        const double cover = std::clamp(1.0 - (d - kLineInner), 0.0, 1.0);
        for (int c = 0; c < 3; ++c) {
          float& px = img.at(y, x, c);
          px = std::max(px, static_cast<float>(cover * skeleton.palette[b][c]));
        }
        // Painter's order: the first (nearest) capsule claims the pixel.
        if (d <= r && img.at(y, x, 5) == 0.0f) {
          img.at(y, x, 3) = static_cast<float>(0.5 * (cos_a + 1.0));
          img.at(y, x, 4) = static_cast<float>(0.5 * (sin_a + 1.0));
          img.at(y, x, 5) = static_cast<float>(rank[b]);
        }
      }
    }
  }
  return label;
}

double pose_distance(const KeypointSet& a, const KeypointSet& b) {
  if (a.size() != b.size()) throw SchemaError("pose_distance: joint counts differ");
  double sum = 0.0;
  int shared = 0;
  for (int j = 0; j < a.size(); ++j) {
    if (!a.visible[j] || !b.visible[j]) continue;
    const double dx = a.points[j][0] - b.points[j][0];
    const double dy = a.points[j][1] - b.points[j][1];
    sum += dx * dx + dy * dy;
    ++shared;
  }
  if (shared == 0) throw ArgumentError("pose_distance: no mutually visible keypoints");
  return std::sqrt(sum);
}

std::vector<double> nearest_neighbor_distances(std::span<const KeypointSet> validation,
                                               std::span<const KeypointSet> training) {
  if (validation.empty() || training.empty()) throw ArgumentError("nearest_neighbor_distances: empty pose list");
  std::vector<double> d(validation.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < validation.size(); ++i) {
    for (const auto& t : training) d[i] = std::min(d[i], pose_distance(validation[i], t));
  }
  return d;
}

std::vector<int> select_challenging(std::span<const KeypointSet> validation, std::span<const KeypointSet> training,
                                    int m) {
  if (m < 0 || m > static_cast<int>(validation.size())) {
    throw ArgumentError("select_challenging: M=" + std::to_string(m) + " outside [0, " +
                        std::to_string(validation.size()) + "]");
  }
  if (m == 0) return {};
  const auto d = nearest_neighbor_distances(validation, training);
  std::vector<int> idx(validation.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] > d[b]; });
  idx.resize(m);
  return idx;
}

}  // namespace nvr
