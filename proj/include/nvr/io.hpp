#pragma once

#include <cstdint>
#include <string>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "nvr/image.hpp"

namespace nvr::io {

// 4-byte magics of the raw tensor files in a dataset directory.
inline constexpr std::string_view kUvMagic = "UVW1";
inline constexpr std::string_view kFlowMagic = "FLW1";
inline constexpr std::string_view kConfidenceMagic = "CNF1";

// magic[4] | u32 H | u32 W | u32 C | H*W*C float32, all little-endian.
void write_raw_tensor(const std::filesystem::path& path, std::string_view magic, const Image& image);
Image read_raw_tensor(const std::filesystem::path& path, std::string_view magic);

// 8-bit PNG I/O. RGB images are clamped to [0,1] and rounded on write.
void write_png_rgb(const std::filesystem::path& path, const Image& image);
Image read_png_rgb(const std::filesystem::path& path);
void write_png_labels(const std::filesystem::path& path, const LabelMap& labels);
LabelMap read_png_labels(const std::filesystem::path& path);

// Lossless FFV1 video (8-bit RGB) in an AVI container.
void write_video(const std::filesystem::path& path, std::span<const Image> frames, double fps = 25.0);
std::vector<Image> read_video(const std::filesystem::path& path);

// Little-endian primitive helpers shared by the binary formats.
void put_u32(std::string& out, std::uint32_t value);
void put_f32(std::string& out, float value);
std::uint32_t get_u32(const char* bytes);
float get_f32(const char* bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// "%06d" style frame file name.
std::string frame_name(int index, std::string_view extension);

}  // namespace nvr::io
