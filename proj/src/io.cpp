#include "nvr/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/videoio.hpp>

#include "nvr/errors.hpp"

namespace nvr::io {

namespace {

constexpr std::size_t kRawHeaderBytes = 16;

std::uint8_t to_byte(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

}  // namespace

void put_u32(std::string& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFFu));
}

void put_f32(std::string& out, float value) { put_u32(out, std::bit_cast<std::uint32_t>(value)); }

std::uint32_t get_u32(const char* bytes) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  return v;
}

float get_f32(const char* bytes) { return std::bit_cast<float>(get_u32(bytes)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to " + path.string());
}

void write_raw_tensor(const std::filesystem::path& path, std::string_view magic, const Image& image) {
  std::string out;
  out.reserve(kRawHeaderBytes + image.data.size() * 4);
  out.append(magic.substr(0, 4));
  put_u32(out, static_cast<std::uint32_t>(image.height));
  put_u32(out, static_cast<std::uint32_t>(image.width));
  put_u32(out, static_cast<std::uint32_t>(image.channels));
  for (float v : image.data) put_f32(out, v);
  write_file(path, out);
}

Image read_raw_tensor(const std::filesystem::path& path, std::string_view magic) {
  const std::string bytes = read_file(path);
  if (bytes.size() < kRawHeaderBytes) throw FormatError(path.string() + ": truncated header");
  if (std::string_view(bytes.data(), 4) != magic.substr(0, 4)) {
    throw FormatError(path.string() + ": bad magic, expected " + std::string(magic));
  }
  const std::uint64_t h = get_u32(bytes.data() + 4);
  const std::uint64_t w = get_u32(bytes.data() + 8);
  const std::uint64_t c = get_u32(bytes.data() + 12);
  if (h == 0 || w == 0 || c == 0 || h > (1u << 16) || w > (1u << 16) || c > 4096) {
    throw FormatError(path.string() + ": implausible dimensions");
  }
  const std::uint64_t count = h * w * c;
  if (bytes.size() != kRawHeaderBytes + count * 4) throw FormatError(path.string() + ": payload size mismatch");
  Image image(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
  for (std::uint64_t i = 0; i < count; ++i) image.data[i] = get_f32(bytes.data() + kRawHeaderBytes + 4 * i);
  return image;
}

namespace {

cv::Mat to_bgr(const Image& image) {
  if (image.channels != 3) throw ShapeError("expected a 3-channel image");
  cv::Mat mat(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.width; ++x) {
      // OpenCV stores BGR.
      row[3 * x + 0] = to_byte(image.at(y, x, 2));
      row[3 * x + 1] = to_byte(image.at(y, x, 1));
      row[3 * x + 2] = to_byte(image.at(y, x, 0));
    }
  }
  return mat;
}

Image from_bgr(const cv::Mat& mat) {
  Image image(mat.rows, mat.cols, 3);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) {
      image.at(y, x, 0) = static_cast<float>(row[3 * x + 2]) / 255.0f;
      image.at(y, x, 1) = static_cast<float>(row[3 * x + 1]) / 255.0f;
      image.at(y, x, 2) = static_cast<float>(row[3 * x + 0]) / 255.0f;
    }
  }
  return image;
}

}  // namespace

void write_png_rgb(const std::filesystem::path& path, const Image& image) {
  const cv::Mat mat = to_bgr(image);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), mat)) throw DataError("cannot write " + path.string());
}

Image read_png_rgb(const std::filesystem::path& path) {
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (mat.empty()) throw DataError("cannot read image " + path.string());
  return from_bgr(mat);
}

void write_png_labels(const std::filesystem::path& path, const LabelMap& labels) {
  cv::Mat mat(labels.height, labels.width, CV_8UC1);
  std::memcpy(mat.data, labels.data.data(), labels.data.size());
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), mat)) throw DataError("cannot write " + path.string());
}

LabelMap read_png_labels(const std::filesystem::path& path) {
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (mat.empty()) throw DataError("cannot read label image " + path.string());
  LabelMap labels(mat.rows, mat.cols);
  for (int y = 0; y < mat.rows; ++y) std::memcpy(&labels.data[static_cast<std::size_t>(y) * mat.cols], mat.ptr(y), mat.cols);
  return labels;
}

void write_video(const std::filesystem::path& path, std::span<const Image> frames, double fps) {
  if (frames.empty()) throw DataError("no frames to encode");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  cv::VideoWriter writer(path.string(), cv::VideoWriter::fourcc('F', 'F', 'V', '1'), fps,
                         cv::Size(frames[0].width, frames[0].height), true);
  if (!writer.isOpened()) throw DataError("cannot open video writer for " + path.string());
  for (const auto& frame : frames) {
    require_same_shape(frame, frames[0], "video frame");
    writer.write(to_bgr(frame));
  }
}

std::vector<Image> read_video(const std::filesystem::path& path) {
  cv::VideoCapture capture(path.string());
  if (!capture.isOpened()) throw DataError("cannot open video " + path.string());
  std::vector<Image> frames;
  cv::Mat mat;
  while (capture.read(mat)) frames.push_back(from_bgr(mat));
  return frames;
}

std::string frame_name(int index, std::string_view extension) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return std::string(buf) + std::string(extension);
}

}  // namespace nvr::io
