#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "nvr/image.hpp"
#include "nvr/keypoints.hpp"

namespace nvr {

// Peak signal-to-noise ratio for images in [0,1]; +infinity for identical
// images. Throws ShapeError on mismatched shapes.
double psnr(const Image& a, const Image& b);

// Pinned SSIM settings: luma (BT.601 weights) of RGB inputs, 11x11 Gaussian
// window with sigma 1.5 over valid positions only, K1 = 0.01, K2 = 0.03,
// dynamic range 1.
struct SsimSettings {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};
// Mean local SSIM. Throws ArgumentError when the image is smaller than the
// window.
double ssim(const Image& a, const Image& b, const SsimSettings& settings = {});

// (1/D) sum_k c_k sum_channels |current - warp(previous, flow)|(k).
double pair_temporal_error(const Image& current, const Image& previous, const Image& flow, const Image& confidence);

// Mean of pair_temporal_error over consecutive pairs; flows[t-1] and
// confidences[t-1] belong to the pair (t-1, t). Throws DataError when a pair
// lacks flow or confidence, ArgumentError for fewer than two frames.
double temporal_error(std::span<const Image> frames, std::span<const Image> flows, std::span<const Image> confidences);

struct RobustMetrics {
  double ssim = 0.0;
  double psnr = 0.0;
  std::vector<int> indices;  // positions into the validation lists
};
// SSIM/PSNR averaged over the M challenging validation poses.
RobustMetrics robust_subset_metrics(std::span<const Image> results, std::span<const Image> ground_truth,
                                    std::span<const KeypointSet> validation_poses,
                                    std::span<const KeypointSet> training_poses, int m = 10);

struct EvalReport {
  double ssim = 0.0;
  double psnr = 0.0;
  double robust_ssim = 0.0;
  double robust_psnr = 0.0;
  double temporal_error = 0.0;
  std::vector<int> frame_indices;  // dataset frame index of each evaluated frame
  std::vector<double> frame_ssim;
  std::vector<double> frame_psnr;
  std::vector<double> nn_distance;  // d_i of each evaluated frame
  std::vector<int> challenging_indices;  // dataset frame indices, most challenging first
  int m = 10;

  bool operator==(const EvalReport&) const = default;
};

// Non-finite doubles are written as the strings "inf" / "-inf" / "nan".
nlohmann::json eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);
void write_eval_report(const std::filesystem::path& json_path, const std::filesystem::path& csv_path,
                       const EvalReport& report);

}  // namespace nvr
