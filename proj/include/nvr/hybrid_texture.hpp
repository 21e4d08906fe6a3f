#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <torch/torch.h>

#include "nvr/image.hpp"
#include "nvr/scene_forge.hpp"

namespace nvr {

// Learnable per-part feature atlas {N, 18, R, R}. Channels 0-2 are explicit
// colour, channels 3-17 implicit detail codes decoded by the detail network.
class HybridTexture {
 public:
  static constexpr int kChannels = 18;
  static constexpr int kColorChannels = 3;

  HybridTexture(int n_parts, int resolution, torch::Dtype dtype = torch::kFloat32);
  // Takes ownership of an {N, 18, R, R} tensor; throws ShapeError otherwise.
  explicit HybridTexture(torch::Tensor values);

  int n_parts() const { return static_cast<int>(values_.size(0)); }
  int resolution() const { return static_cast<int>(values_.size(2)); }
  torch::Tensor& values() { return values_; }
  const torch::Tensor& values() const { return values_; }

  // Channels 0-2 of one part as an R x R x 3 image clamped to [0,1].
  Image color_preview(int part) const;
  // Throws NumericalError if any value is NaN or infinite.
  void check_finite() const;

 private:
  torch::Tensor values_;
};

struct TextureInitResult {
  HybridTexture texture;
  // 1-based ids of parts that no pixel maps to; their colour is mid-grey.
  std::vector<int> uncovered_parts;
};

// Colour channels from the per-texel mean of the unwrapped frames (see
// brute_force_unwrap), uncovered texels diffusion-filled from covered ones;
// detail channels zero.
TextureInitResult initialize_from_video(const SyntheticSequence& seq, int resolution,
                                        std::span<const int> frame_indices = {});

// HTX1 | u32 N | u32 channels | u32 R | float32 LE payload in {N, C, R, R}
// order.
void save_texture(const std::filesystem::path& path, const HybridTexture& texture);
// Throws FormatError on bad magic, dimensions or truncation.
HybridTexture load_texture(const std::filesystem::path& path);
// Writes texture_part_%02d.png (1-based part id) for every part.
void export_texture_previews(const std::filesystem::path& dir, const HybridTexture& texture);

}  // namespace nvr
