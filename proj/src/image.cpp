#include "nvr/image.hpp"

#include "nvr/errors.hpp"

namespace nvr {

void require_same_shape(const Image& a, const Image& b, const std::string& what) {
  if (!a.same_shape(b)) {
    throw ShapeError(what + ": shape mismatch (" + std::to_string(a.height) + "x" + std::to_string(a.width) + "x" +
                     std::to_string(a.channels) + " vs " + std::to_string(b.height) + "x" + std::to_string(b.width) +
                     "x" + std::to_string(b.channels) + ")");
  }
}

}  // namespace nvr

namespace nvr {

bool diffusion_fill(Image& image, const std::vector<std::uint8_t>& known, int relax_iterations) {
  const int H = image.height;
  const int W = image.width;
  const int C = image.channels;
  if (known.size() != image.pixel_count()) throw ShapeError("diffusion_fill: mask size mismatch");
  std::vector<std::uint8_t> state(known.begin(), known.end());
  std::size_t n_known = 0;
  for (auto k : state) n_known += k != 0;
  if (n_known == 0) return false;
  if (n_known == state.size()) return true;

  constexpr int kDx[4] = {1, -1, 0, 0};
  constexpr int kDy[4] = {0, 0, 1, -1};
  std::vector<std::size_t> frontier;
  while (n_known < state.size()) {
    frontier.clear();
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * W + x;
        if (state[p]) continue;
        double sum[64] = {};
        int n = 0;
        for (int k = 0; k < 4; ++k) {
          const int nx = x + kDx[k];
          const int ny = y + kDy[k];
          if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
          if (!state[static_cast<std::size_t>(ny) * W + nx]) continue;
          for (int c = 0; c < C && c < 64; ++c) sum[c] += image.at(ny, nx, c);
          ++n;
        }
        if (n == 0) continue;
        for (int c = 0; c < C && c < 64; ++c) image.at(y, x, c) = static_cast<float>(sum[c] / n);
        frontier.push_back(p);
      }
    }
    for (auto p : frontier) state[p] = 1;
    n_known += frontier.size();
  }

  Image next = image;
  for (int it = 0; it < relax_iterations; ++it) {
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        if (known[static_cast<std::size_t>(y) * W + x]) continue;
        for (int c = 0; c < C; ++c) {
          double sum = 0.0;
          int n = 0;
          for (int k = 0; k < 4; ++k) {
            const int nx = x + kDx[k];
            const int ny = y + kDy[k];
            if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
            sum += image.at(ny, nx, c);
            ++n;
          }
          next.at(y, x, c) = static_cast<float>(sum / n);
        }
      }
    }
    std::swap(image.data, next.data);
    next.data = image.data;
  }
  return true;
}

}  // namespace nvr
