#include "nvr/hybrid_texture.hpp"

#include <algorithm>
#include <cstdio>

#include "nvr/errors.hpp"
#include "nvr/io.hpp"

namespace nvr {

namespace {
constexpr std::string_view kTextureMagic = "HTX1";
constexpr std::size_t kHeaderBytes = 16;
}  // namespace

HybridTexture::HybridTexture(int n_parts, int resolution, torch::Dtype dtype) {
  if (n_parts < 1 || resolution < 1) throw ArgumentError("texture needs n_parts >= 1 and resolution >= 1");
  values_ = torch::zeros({n_parts, kChannels, resolution, resolution}, dtype);
}

HybridTexture::HybridTexture(torch::Tensor values) : values_(std::move(values)) {
  if (values_.dim() != 4 || values_.size(1) != kChannels || values_.size(2) != values_.size(3)) {
    throw ShapeError("hybrid texture must be {N, 18, R, R}");
  }
}

Image HybridTexture::color_preview(int part) const {
  const auto rgb = values_.detach()[part].narrow(0, 0, kColorChannels).clamp(0.0, 1.0).to(torch::kFloat32);
  const auto hwc = rgb.permute({1, 2, 0}).contiguous();
  Image image(resolution(), resolution(), kColorChannels);
  std::copy_n(hwc.data_ptr<float>(), image.data.size(), image.data.begin());
  return image;
}

void HybridTexture::check_finite() const {
  if (!torch::isfinite(values_.detach()).all().item<bool>()) throw NumericalError("hybrid texture has non-finite values");
}

TextureInitResult initialize_from_video(const SyntheticSequence& seq, int resolution, std::span<const int> frame_indices) {
  const UnwrapResult unwrap = brute_force_unwrap(seq, resolution, frame_indices);
  const int N = unwrap.n_parts;
  const int R = resolution;
  auto values = torch::zeros({N, HybridTexture::kChannels, R, R}, torch::kFloat32);
  auto acc = values.accessor<float, 4>();
  std::vector<int> uncovered;
  for (int part = 0; part < N; ++part) {
    Image color(R, R, 3);
    std::vector<std::uint8_t> known(static_cast<std::size_t>(R) * R, 0);
    for (int y = 0; y < R; ++y) {
      for (int x = 0; x < R; ++x) {
        const std::size_t k = unwrap.texel(part, y, x);
        if (unwrap.coverage[k] == 0) continue;
        known[static_cast<std::size_t>(y) * R + x] = 1;
        for (int c = 0; c < 3; ++c) color.at(y, x, c) = static_cast<float>(unwrap.color[3 * k + c]);
      }
    }
    if (!diffusion_fill(color, known)) {
      uncovered.push_back(part + 1);
      std::fill(color.data.begin(), color.data.end(), 0.5f);
    }
    for (int y = 0; y < R; ++y) {
      for (int x = 0; x < R; ++x) {
        for (int c = 0; c < 3; ++c) acc[part][c][y][x] = color.at(y, x, c);
      }
    }
  }
  return {HybridTexture(values), std::move(uncovered)};
}

void save_texture(const std::filesystem::path& path, const HybridTexture& texture) {
  const auto v = texture.values().detach().to(torch::kFloat32).contiguous();
  std::string out;
  out.reserve(kHeaderBytes + v.numel() * 4);
  out.append(kTextureMagic);
  io::put_u32(out, static_cast<std::uint32_t>(v.size(0)));
  io::put_u32(out, static_cast<std::uint32_t>(v.size(1)));
  io::put_u32(out, static_cast<std::uint32_t>(v.size(2)));
  const float* p = v.data_ptr<float>();
  for (int64_t i = 0; i < v.numel(); ++i) io::put_f32(out, p[i]);
  io::write_file(path, out);
}

HybridTexture load_texture(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  if (bytes.size() < kHeaderBytes) throw FormatError(path.string() + ": truncated texture header");
  if (std::string_view(bytes.data(), 4) != kTextureMagic) throw FormatError(path.string() + ": not an HTX1 texture");
  const std::uint64_t n = io::get_u32(bytes.data() + 4);
  const std::uint64_t c = io::get_u32(bytes.data() + 8);
  const std::uint64_t r = io::get_u32(bytes.data() + 12);
  if (c != HybridTexture::kChannels) throw FormatError(path.string() + ": texture must have 18 channels");
  if (n == 0 || r == 0 || n > 4096 || r > 8192) throw FormatError(path.string() + ": implausible texture dimensions");
  const std::uint64_t count = n * c * r * r;
  if (bytes.size() != kHeaderBytes + 4 * count) throw FormatError(path.string() + ": texture payload size mismatch");
  auto values = torch::empty({static_cast<int64_t>(n), static_cast<int64_t>(c), static_cast<int64_t>(r),
                              static_cast<int64_t>(r)},
                             torch::kFloat32);
  float* p = values.data_ptr<float>();
  for (std::uint64_t i = 0; i < count; ++i) p[i] = io::get_f32(bytes.data() + kHeaderBytes + 4 * i);
  return HybridTexture(values);
}

void export_texture_previews(const std::filesystem::path& dir, const HybridTexture& texture) {
  for (int part = 0; part < texture.n_parts(); ++part) {
    char name[40];
    std::snprintf(name, sizeof(name), "texture_part_%02d.png", part + 1);
    io::write_png_rgb(dir / name, texture.color_preview(part));
  }
}

}  // namespace nvr
