#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nvr/errors.hpp"
#include "nvr/pose_labels.hpp"
#include "nvr/scene_forge.hpp"
#include "support.hpp"

using namespace nvr;

namespace {

// Exhaustive double loop over both pose lists.
std::vector<int> challenging_oracle(const std::vector<KeypointSet>& val, const std::vector<KeypointSet>& train,
                                    int m) {
  std::vector<double> d(val.size());
  for (std::size_t i = 0; i < val.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : train) {
      double s = 0;
      for (int j = 0; j < val[i].size(); ++j) {
        const double dx = val[i].points[j][0] - t.points[j][0];
        const double dy = val[i].points[j][1] - t.points[j][1];
        s += dx * dx + dy * dy;
      }
      best = std::min(best, std::sqrt(s));
    }
    d[i] = best;
  }
  std::vector<int> out;
  std::vector<bool> used(val.size(), false);
  for (int k = 0; k < m; ++k) {
    int pick = -1;
    for (std::size_t i = 0; i < val.size(); ++i) {
      if (!used[i] && (pick < 0 || d[i] > d[pick])) pick = static_cast<int>(i);
    }
    used[pick] = true;
    out.push_back(pick);
  }
  return out;
}

}  // namespace

TEST_SUITE("pose_labels") {

TEST_CASE("raster has six channels in [0,1] and is deterministic") {
  const auto seq = generate_sequence(test::dance_scene(8, 3, 0.0, 4));
  const auto a = rasterize_pose(seq.keypoints[1], seq.skeleton, 32, 32);
  const auto b = rasterize_pose(seq.keypoints[1], seq.skeleton, 32, 32);
  CHECK(a.data.channels == PoseLabelImage::kChannels);
  CHECK(a.data == b.data);
  float peak = 0;
  for (float v : a.data.data) {
    CHECK((v >= 0.0f && v <= 1.0f));
    peak = std::max(peak, v);
  }
  CHECK(peak > 0.0f);
}

TEST_CASE("no visible keypoints: skeleton channels empty") {
  const auto seq = generate_sequence(test::dance_scene(8, 2, 0.0, 4));
  KeypointSet k = seq.keypoints[0];
  std::fill(k.visible.begin(), k.visible.end(), false);
  const auto r = rasterize_pose(k, seq.skeleton, 32, 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      for (int c = 0; c < 3; ++c) CHECK(r.data.at(y, x, c) == 0.0f);
    }
  }
}

TEST_CASE("skeleton channels are zero far from every bone") {
  const auto seq = generate_sequence(test::dance_scene(8, 2, 0.0, 4));
  const auto r = rasterize_pose(seq.keypoints[0], seq.skeleton, 32, 32);
  const auto& kps = seq.keypoints[0];
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      double nearest = 1e9;
      for (const auto& bone : seq.skeleton.bones) {
        const auto& p = kps.points[bone[0]];
        const auto& q = kps.points[bone[1]];
        const double vx = q[0] - p[0], vy = q[1] - p[1];
        const double len2 = vx * vx + vy * vy;
        double t = len2 > 0 ? ((x - p[0]) * vx + (y - p[1]) * vy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        nearest = std::min(nearest, std::hypot(x - p[0] - t * vx, y - p[1] - t * vy));
      }
      if (nearest > 2.0) {
        for (int c = 0; c < 3; ++c) CHECK(r.data.at(y, x, c) == 0.0f);
      }
    }
  }
}

TEST_CASE("translating keypoints translates the raster") {
  const auto seq = generate_sequence(test::dance_scene(8, 2, 0.0, 6, 48));
  KeypointSet shifted = seq.keypoints[0];
  for (auto& p : shifted.points) p[0] += 5.0;
  const auto a = rasterize_pose(seq.keypoints[0], seq.skeleton, 48, 48);
  const auto b = rasterize_pose(shifted, seq.skeleton, 48, 48);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x + 5 < 48; ++x) {
      for (int c = 0; c < 6; ++c) CHECK(std::abs(b.data.at(y, x + 5, c) - a.data.at(y, x, c)) <= 1e-5);
    }
  }
}

TEST_CASE("joint count mismatch is a schema error") {
  const auto seq = generate_sequence(test::dance_scene(8, 2, 0.0, 4));
  KeypointSet k = seq.keypoints[0];
  k.points.pop_back();
  k.visible.pop_back();
  CHECK_THROWS_AS(rasterize_pose(k, seq.skeleton, 32, 32), SchemaError);
}

TEST_CASE("pose distance examples") {
  KeypointSet a({{1, 1}, {2, 2}, {5, 5}});
  CHECK(pose_distance(a, a) == 0.0);
  KeypointSet b = a;
  b.points[1] = {5, 6};
  CHECK(pose_distance(a, b) == doctest::Approx(5.0));
  b.visible[1] = false;
  CHECK(pose_distance(a, b) == 0.0);
  std::fill(b.visible.begin(), b.visible.end(), false);
  CHECK_THROWS_AS(pose_distance(a, b), ArgumentError);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto p = test::random_pose(7, rng);
    const auto q = test::random_pose(7, rng);
    CHECK(pose_distance(p, q) == pose_distance(q, p));
  }
}

TEST_CASE("select_challenging matches the exhaustive oracle") {
  std::mt19937_64 rng(17);
  std::vector<KeypointSet> val, train;
  for (int i = 0; i < 20; ++i) val.push_back(test::random_pose(9, rng));
  for (int i = 0; i < 50; ++i) train.push_back(test::random_pose(9, rng));
  for (int m : {1, 10, 20}) CHECK(select_challenging(val, train, m) == challenging_oracle(val, train, m));
}

TEST_CASE("select_challenging edge cases") {
  std::mt19937_64 rng(5);
  std::vector<KeypointSet> val, train;
  for (int i = 0; i < 6; ++i) val.push_back(test::random_pose(4, rng));
  for (int i = 0; i < 8; ++i) train.push_back(test::random_pose(4, rng));
  train.push_back(val[2]);
  const auto picks = select_challenging(val, train, 5);
  CHECK(std::find(picks.begin(), picks.end(), 2) == picks.end());
  CHECK(select_challenging(val, train, 0).empty());
  CHECK_THROWS_AS(select_challenging(val, train, 7), ArgumentError);

  // Ties go to the lower index.
  std::vector<KeypointSet> tied{KeypointSet({{1, 0}}), KeypointSet({{-1, 0}}), KeypointSet({{0, 1}})};
  std::vector<KeypointSet> origin{KeypointSet({{0, 0}})};
  CHECK(select_challenging(tied, origin, 2) == std::vector<int>{0, 1});
}

TEST_CASE("nearest-neighbour distances: permutation invariance and monotonicity") {
  std::mt19937_64 rng(8);
  std::vector<KeypointSet> val, train;
  for (int i = 0; i < 12; ++i) val.push_back(test::random_pose(5, rng));
  for (int i = 0; i < 15; ++i) train.push_back(test::random_pose(5, rng));
  const auto picks = select_challenging(val, train, 6);
  auto shuffled = train;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(select_challenging(val, shuffled, 6) == picks);

  auto d = nearest_neighbor_distances(val, train);
  for (int i = 0; i < 10; ++i) {
    train.push_back(test::random_pose(5, rng));
    const auto next = nearest_neighbor_distances(val, train);
    for (std::size_t k = 0; k < d.size(); ++k) CHECK(next[k] <= d[k]);
    d = next;
  }
}

}  // TEST_SUITE
