#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "json.hpp"
#include "nvr/train_config.hpp"

namespace nvr {

// On disk:
//   "NVCK" | u32 format version | u32 manifest bytes | manifest JSON |
//   float32 LE payloads in manifest order.
// The manifest records the format version, the full train config, its
// architecture hash, the step counter and, per tensor, name / shape / byte
// offset into the payload block.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string kind;  // "pretrain" or "train"
  std::int64_t step = 0;
  nlohmann::json config;
  std::map<std::string, torch::Tensor> tensors;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
// FormatError on bad magic / truncation; VersionError on an unknown format
// version or a config hash that does not match the stored config.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

TrainConfig checkpoint_config(const Checkpoint& checkpoint);

enum class CompatScope { kFull, kUvGenerator };
// VersionError unless the checkpoint architecture matches `config` (entirely,
// or only in the fields that shape the UV generator).
void require_compatible(const Checkpoint& checkpoint, const TrainConfig& config,
                        CompatScope scope = CompatScope::kFull);

// Parameters and buffers of a module under "<prefix>/<name>".
void export_module(const std::string& prefix, const torch::nn::Module& module,
                   std::map<std::string, torch::Tensor>& out);
// Copies tensors back in place; VersionError on a missing name or shape
// mismatch.
void import_module(const std::string& prefix, torch::nn::Module& module,
                   const std::map<std::string, torch::Tensor>& tensors);

// Adam moments and step counts, keyed by the names of the optimised tensors.
using NamedParams = std::vector<std::pair<std::string, torch::Tensor>>;
void export_adam(const std::string& prefix, torch::optim::Adam& optimizer, const NamedParams& params,
                 std::map<std::string, torch::Tensor>& out);
void import_adam(const std::string& prefix, torch::optim::Adam& optimizer, const NamedParams& params,
                 const std::map<std::string, torch::Tensor>& tensors);

}  // namespace nvr
