#include "nvr/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nvr/errors.hpp"
#include "nvr/flow_warp.hpp"
#include "nvr/io.hpp"
#include "nvr/pose_labels.hpp"

namespace nvr {

namespace {

std::vector<double> luma(const Image& image) {
  std::vector<double> y(image.pixel_count());
  for (std::size_t p = 0; p < y.size(); ++p) {
    if (image.channels == 1) {
      y[p] = image.data[p];
    } else {
      const float* px = &image.data[p * image.channels];
      y[p] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
    }
  }
  return y;
}

// Valid-mode separable filtering of an H x W plane.
std::vector<double> filter_valid(const std::vector<double>& src, int height, int width, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = width - n + 1;
  const int oh = height - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(height) * ow);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * src[static_cast<std::size_t>(y) * width + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  require_same_shape(a, b, "psnr");
  if (a.data.empty()) throw ArgumentError("psnr of empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b, const SsimSettings& s) {
  require_same_shape(a, b, "ssim");
  if (a.height < s.window || a.width < s.window) {
    throw ArgumentError("ssim: image smaller than the " + std::to_string(s.window) + "x" + std::to_string(s.window) +
                        " window");
  }
  std::vector<double> kernel(s.window);
  const double centre = (s.window - 1) / 2.0;
  double ksum = 0.0;
  for (int i = 0; i < s.window; ++i) {
    kernel[i] = std::exp(-((i - centre) * (i - centre)) / (2.0 * s.sigma * s.sigma));
    ksum += kernel[i];
  }
  for (double& k : kernel) k /= ksum;

  const auto x = luma(a);
  const auto y = luma(b);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const int H = a.height, W = a.width;
  const auto mx = filter_valid(x, H, W, kernel);
  const auto my = filter_valid(y, H, W, kernel);
  const auto sxx = filter_valid(xx, H, W, kernel);
  const auto syy = filter_valid(yy, H, W, kernel);
  const auto sxy = filter_valid(xy, H, W, kernel);
  const double c1 = (s.k1) * (s.k1);
  const double c2 = (s.k2) * (s.k2);
  std::vector<double> map(mx.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    map[i] = ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) / ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return mean_of(map);
}

double pair_temporal_error(const Image& current, const Image& previous, const Image& flow, const Image& confidence) {
  require_same_shape(current, previous, "temporal error frames");
  if (confidence.channels != 1 || confidence.height != current.height || confidence.width != current.width) {
    throw ShapeError("temporal error: confidence must be H x W x 1");
  }
  const auto warped = warp_planar(previous, flow);
  const std::size_t plane = current.pixel_count();
  const int C = current.channels;
  double sum = 0.0;
  for (std::size_t p = 0; p < plane; ++p) {
    const double c = confidence.data[p];
    if (c == 0.0) continue;
    double diff = 0.0;
    for (int ch = 0; ch < C; ++ch) diff += std::abs(static_cast<double>(current.data[p * C + ch]) - warped[ch * plane + p]);
    sum += c * diff;
  }
  return sum / static_cast<double>(plane);
}

double temporal_error(std::span<const Image> frames, std::span<const Image> flows, std::span<const Image> confidences) {
  if (frames.size() < 2) throw ArgumentError("temporal_error needs at least two frames");
  if (flows.size() < frames.size() - 1 || confidences.size() < frames.size() - 1) {
    throw DataError("temporal_error: missing flow or confidence for a frame pair");
  }
  double sum = 0.0;
  for (std::size_t t = 1; t < frames.size(); ++t) {
    sum += pair_temporal_error(frames[t], frames[t - 1], flows[t - 1], confidences[t - 1]);
  }
  return sum / static_cast<double>(frames.size() - 1);
}

RobustMetrics robust_subset_metrics(std::span<const Image> results, std::span<const Image> ground_truth,
                                    std::span<const KeypointSet> validation_poses,
                                    std::span<const KeypointSet> training_poses, int m) {
  if (results.size() != ground_truth.size() || results.size() != validation_poses.size()) {
    throw ArgumentError("robust_subset_metrics: frame and pose counts differ");
  }
  RobustMetrics r;
  r.indices = select_challenging(validation_poses, training_poses, m);
  if (r.indices.empty()) return r;
  for (int i : r.indices) {
    r.ssim += ssim(results[i], ground_truth[i]);
    r.psnr += psnr(results[i], ground_truth[i]);
  }
  r.ssim /= static_cast<double>(r.indices.size());
  r.psnr /= static_cast<double>(r.indices.size());
  return r;
}

namespace {

nlohmann::json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double parse_number(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw DataError("eval report: unexpected string '" + s + "'");
  }
  return j.get<double>();
}

nlohmann::json numbers(const std::vector<double>& v) {
  auto a = nlohmann::json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::vector<double> parse_numbers(const nlohmann::json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(parse_number(x));
  return v;
}

}  // namespace

nlohmann::json eval_report_to_json(const EvalReport& r) {
  return nlohmann::json{{"ssim", number(r.ssim)},
                        {"psnr", number(r.psnr)},
                        {"robust_ssim", number(r.robust_ssim)},
                        {"robust_psnr", number(r.robust_psnr)},
                        {"temporal_error", number(r.temporal_error)},
                        {"m", r.m},
                        {"frame_indices", r.frame_indices},
                        {"frame_ssim", numbers(r.frame_ssim)},
                        {"frame_psnr", numbers(r.frame_psnr)},
                        {"nn_distance", numbers(r.nn_distance)},
                        {"challenging_indices", r.challenging_indices}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.ssim = parse_number(j.at("ssim"));
    r.psnr = parse_number(j.at("psnr"));
    r.robust_ssim = parse_number(j.at("robust_ssim"));
    r.robust_psnr = parse_number(j.at("robust_psnr"));
    r.temporal_error = parse_number(j.at("temporal_error"));
    r.m = j.at("m").get<int>();
    r.frame_indices = j.at("frame_indices").get<std::vector<int>>();
    r.frame_ssim = parse_numbers(j.at("frame_ssim"));
    r.frame_psnr = parse_numbers(j.at("frame_psnr"));
    r.nn_distance = parse_numbers(j.at("nn_distance"));
    r.challenging_indices = j.at("challenging_indices").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("eval report: ") + e.what());
  }
  return r;
}

void write_eval_report(const std::filesystem::path& json_path, const std::filesystem::path& csv_path,
                       const EvalReport& report) {
  io::write_file(json_path, eval_report_to_json(report).dump(2));
  std::ostringstream csv;
  csv.precision(10);
  csv << "frame,ssim,psnr,nn_distance,challenging\n";
  for (std::size_t i = 0; i < report.frame_indices.size(); ++i) {
    const int f = report.frame_indices[i];
    const bool hard = std::find(report.challenging_indices.begin(), report.challenging_indices.end(), f) !=
                      report.challenging_indices.end();
    csv << f << ',' << report.frame_ssim[i] << ',';
    if (std::isinf(report.frame_psnr[i])) {
      csv << "inf";
    } else {
      csv << report.frame_psnr[i];
    }
    csv << ',' << report.nn_distance[i] << ',' << (hard ? 1 : 0) << '\n';
  }
  io::write_file(csv_path, csv.str());
}

}  // namespace nvr
