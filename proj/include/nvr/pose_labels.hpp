#pragma once

#include <span>
#include <vector>

#include "nvr/image.hpp"
#include "nvr/keypoints.hpp"
#include "nvr/skeleton.hpp"

namespace nvr {

// 6-channel pose conditioning raster. Channels 0-2 hold the anti-aliased
// skeleton drawn with the per-bone palette; channels 3-5 hold the geometry
// proxy of the capsule owning each pixel: (cos a + 1) / 2, (sin a + 1) / 2 for
// the bone direction a, and the part's depth rank in (0, 1]. Pixels outside
// every capsule are zero in the geometry channels.
struct PoseLabelImage {
  static constexpr int kChannels = 6;
  Image data;
};

// Throws SchemaError when the keypoint count differs from skeleton.n_joints.
PoseLabelImage rasterize_pose(const KeypointSet& keypoints, const Skeleton& skeleton, int height, int width);

// Euclidean norm of the stacked coordinate differences over mutually visible
// joints, in pixels. Throws ArgumentError when no joint is visible in both.
double pose_distance(const KeypointSet& a, const KeypointSet& b);

// Nearest-neighbour distance of every validation pose to the training set.
std::vector<double> nearest_neighbor_distances(std::span<const KeypointSet> validation,
                                               std::span<const KeypointSet> training);

// Indices of the M validation poses farthest from the training set, in
// decreasing distance; ties go to the lower index.
std::vector<int> select_challenging(std::span<const KeypointSet> validation, std::span<const KeypointSet> training,
                                    int m);

}  // namespace nvr
