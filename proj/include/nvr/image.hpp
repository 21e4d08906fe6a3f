#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nvr {

// Dense H x W x C float grid stored row-major with interleaved channels.
// Used for frames (C=3), UV maps and flows (C=2), confidences (C=1) and
// pose labels (C=6).
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int h, int w, int c, float fill = 0.0f)
      : height(h), width(w), channels(c), data(static_cast<std::size_t>(h) * w * c, fill) {}

  std::size_t index(int y, int x, int c = 0) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  float& at(int y, int x, int c = 0) { return data[index(y, x, c)]; }
  float at(int y, int x, int c = 0) const { return data[index(y, x, c)]; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
  bool same_shape(const Image& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
  bool operator==(const Image&) const = default;
};

// Integer label per pixel: part ids (0 = background) or boolean masks.
struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  LabelMap() = default;
  LabelMap(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

  std::uint8_t& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const LabelMap&) const = default;
};

// Throws ShapeError naming `what` when the two images differ in shape.
void require_same_shape(const Image& a, const Image& b, const std::string& what);

}  // namespace nvr

namespace nvr {

// Fills pixels whose `known` flag is 0 from their known neighbours: an
// onion-peel pass assigns each unknown pixel the mean of its already known
// 4-neighbours, then `relax_iterations` Jacobi sweeps smooth the filled
// region with the known pixels held fixed. Returns false (image untouched)
// when nothing is known.
bool diffusion_fill(Image& image, const std::vector<std::uint8_t>& known, int relax_iterations = 100);

}  // namespace nvr
