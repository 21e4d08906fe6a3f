#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <random>
#include <string>

#include <torch/torch.h>

#include "nvr/image.hpp"
#include "nvr/keypoints.hpp"
#include "nvr/scene_forge.hpp"

namespace nvr {

// Failure messages only; also keeps libtorch's catch-all vector printer from
// being picked for these types.
inline std::ostream& operator<<(std::ostream& os, const Image& im) {
  return os << "Image(" << im.height << "x" << im.width << "x" << im.channels << ")";
}
inline std::ostream& operator<<(std::ostream& os, const LabelMap& m) {
  return os << "LabelMap(" << m.height << "x" << m.width << ")";
}
inline std::ostream& operator<<(std::ostream& os, const KeypointSet& k) { return os << "KeypointSet(" << k.size() << ")"; }

}  // namespace nvr

namespace nvr::test {

// Analytic gradient of a scalar function against central differences, as
// ||g_analytic - g_numeric|| / max(||g_numeric||, 1e-12). `x` must be double.
inline double gradient_error(const std::function<torch::Tensor(const torch::Tensor&)>& f, torch::Tensor x,
                             double eps = 1e-6) {
  x = x.detach().clone().set_requires_grad(true);
  f(x).backward();
  const torch::Tensor analytic = x.grad().detach().clone();
  torch::Tensor numeric = torch::zeros_like(analytic);
  torch::NoGradGuard no_grad;
  auto flat = x.view(-1);
  auto nflat = numeric.view(-1);
  for (std::int64_t i = 0; i < flat.numel(); ++i) {
    const double orig = flat[i].item<double>();
    flat[i].fill_(orig + eps);
    const double up = f(x).item<double>();
    flat[i].fill_(orig - eps);
    const double down = f(x).item<double>();
    flat[i].fill_(orig);
    nflat[i].fill_((up - down) / (2 * eps));
  }
  return (analytic - numeric).norm().item<double>() / std::max(numeric.norm().item<double>(), 1e-12);
}

// Same check for a parameter tensor inside a module: perturbs `param` in
// place and evaluates `loss()`.
inline double parameter_gradient_error(const std::function<torch::Tensor()>& loss, torch::Tensor param,
                                       int max_entries = 24, double eps = 1e-6) {
  if (param.grad().defined()) param.mutable_grad().zero_();
  loss().backward();
  const torch::Tensor analytic = param.grad().detach().clone().view(-1);
  torch::NoGradGuard no_grad;
  auto flat = param.view(-1);
  const std::int64_t n = std::min<std::int64_t>(flat.numel(), max_entries);
  std::vector<double> a, num;
  for (std::int64_t i = 0; i < n; ++i) {
    const double orig = flat[i].item<double>();
    flat[i].fill_(orig + eps);
    const double up = loss().item<double>();
    flat[i].fill_(orig - eps);
    const double down = loss().item<double>();
    flat[i].fill_(orig);
    a.push_back(analytic[i].item<double>());
    num.push_back((up - down) / (2 * eps));
  }
  double diff = 0, norm = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - num[i]) * (a[i] - num[i]);
    norm += num[i] * num[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

inline Image random_image(int h, int w, int c, std::uint64_t seed, float lo = 0.0f, float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  Image im(h, w, c);
  for (auto& v : im.data) v = dist(rng);
  return im;
}

inline KeypointSet random_pose(int joints, std::mt19937_64& rng, double extent = 64.0) {
  std::uniform_real_distribution<double> dist(0.0, extent);
  std::vector<std::array<double, 2>> pts(joints);
  for (auto& p : pts) p = {dist(rng), dist(rng)};
  return KeypointSet(std::move(pts));
}

inline SceneConfig static_scene(int n_parts, int n_frames, int size = 32) {
  SceneConfig c;
  c.height = size;
  c.width = size;
  c.n_parts = n_parts;
  c.n_frames = n_frames;
  c.motion_script = static_motion(n_parts, n_frames, size, size);
  c.texture_spec = default_textures(n_parts, 0);
  return c;
}

// Small dancing puppet scene.
inline SceneConfig dance_scene(int n_parts, int n_frames, double detail, std::uint64_t seed, int size = 32) {
  SceneConfig c;
  c.height = size;
  c.width = size;
  c.n_parts = n_parts;
  c.n_frames = n_frames;
  c.detail_amplitude = detail;
  c.background_pattern = 1;
  c.seed = seed;
  c.motion_script = dance_motion(n_parts, n_frames, size, size, seed);
  c.texture_spec = default_textures(n_parts, seed);
  return c;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("nvr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace nvr::test
