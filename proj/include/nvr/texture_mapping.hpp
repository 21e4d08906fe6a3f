#pragma once

#include <cstdint>

#include <torch/torch.h>

namespace nvr {

// Screen-space mapping of per-part texture atlases through predicted UVs.
//
// Texel addressing: u = 0 hits the centre of texel column 0 and u = 1 the
// centre of column R-1 (likewise v for rows), i.e. the continuous texel
// coordinate is (u * (R-1), v * (R-1)). Out-of-range UVs are clamped to
// [0,1] (no gradient flows through the clamped component) and counted.

// texture {N, C, R, R}, coords {B, N, H, W, 2} (u, v) -> {B, N, C, H, W}.
// Bilinear, differentiable with respect to both texture and coords.
torch::Tensor sample_parts(const torch::Tensor& texture, const torch::Tensor& coords);

// Single part: texture {C, R, R}, coords {H, W, 2} -> {C, H, W}.
torch::Tensor sample_part(const torch::Tensor& texture, const torch::Tensor& coords);

// probs {B, N+1, H, W} (index 0 = background), samples {B, N, C, H, W}
// -> {B, C, H, W} = sum_{i=1..N} probs_i * samples_{i-1}.
torch::Tensor blend_parts(const torch::Tensor& probs, const torch::Tensor& samples);

// RGB channels 0-2 of an 18-channel screen feature {B, 18, H, W}.
torch::Tensor static_component(const torch::Tensor& feature);

// Number of UV samples clamped into [0,1] since the last reset.
std::int64_t clamped_uv_count();
void reset_clamped_uv_count();

}  // namespace nvr
