#include "nvr/checkpoint.hpp"

#include <cstring>

#include "nvr/errors.hpp"
#include "nvr/io.hpp"

namespace nvr {

namespace {

constexpr char kMagic[4] = {'N', 'V', 'C', 'K'};

torch::Tensor as_payload(const torch::Tensor& t) {
  return t.detach().to(torch::kCPU, torch::kFloat32).contiguous();
}

const torch::Tensor& find_tensor(const std::map<std::string, torch::Tensor>& tensors, const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw VersionError("checkpoint lacks tensor '" + name + "'");
  return it->second;
}

void copy_into(torch::Tensor& dst, const torch::Tensor& src, const std::string& name) {
  if (dst.sizes() != src.sizes()) {
    throw VersionError("checkpoint tensor '" + name + "' has shape " + c10::str(src.sizes()) + ", model expects " +
                       c10::str(dst.sizes()));
  }
  torch::NoGradGuard no_grad;
  dst.copy_(src.to(dst.dtype()));
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  nlohmann::json index = nlohmann::json::array();
  std::vector<torch::Tensor> payloads;
  std::uint64_t offset = 0;
  for (const auto& [name, tensor] : ck.tensors) {
    torch::Tensor p = as_payload(tensor);
    index.push_back({{"name", name}, {"shape", p.sizes().vec()}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(p.numel()) * 4;
    payloads.push_back(std::move(p));
  }
  const TrainConfig config = train_config_from_json(ck.config);
  nlohmann::json manifest{{"version", kCheckpointVersion},
                          {"kind", ck.kind},
                          {"step", ck.step},
                          {"config", train_config_to_json(config)},
                          {"config_hash", architecture_hash(config)},
                          {"tensors", index}};
  const std::string text = manifest.dump();

  std::string out;
  out.reserve(12 + text.size() + offset);
  out.append(kMagic, 4);
  io::put_u32(out, kCheckpointVersion);
  io::put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const auto& p : payloads) {
    const float* data = p.data_ptr<float>();
    for (std::int64_t i = 0; i < p.numel(); ++i) io::put_f32(out, data[i]);
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  const std::uint32_t version = io::get_u32(bytes.data() + 4);
  if (version != kCheckpointVersion) {
    throw VersionError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t manifest_size = io::get_u32(bytes.data() + 8);
  if (bytes.size() < 12ull + manifest_size) throw FormatError("checkpoint truncated in manifest");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + manifest_size);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint manifest: ") + e.what());
  }

  Checkpoint ck;
  std::size_t payload_start = 12ull + manifest_size;
  try {
    if (manifest.at("version").get<std::uint32_t>() != kCheckpointVersion) {
      throw VersionError("checkpoint manifest version mismatch");
    }
    ck.kind = manifest.at("kind").get<std::string>();
    ck.step = manifest.at("step").get<std::int64_t>();
    ck.config = manifest.at("config");
    const TrainConfig config = [&] {
      try {
        return train_config_from_json(ck.config);
      } catch (const ConfigError& e) {
        throw VersionError(std::string("checkpoint config: ") + e.what());
      }
    }();
    if (manifest.at("config_hash").get<std::string>() != architecture_hash(config)) {
      throw VersionError("checkpoint config hash does not match its config");
    }
    for (const auto& entry : manifest.at("tensors")) {
      const auto name = entry.at("name").get<std::string>();
      const auto shape = entry.at("shape").get<std::vector<std::int64_t>>();
      const auto offset = entry.at("offset").get<std::uint64_t>();
      std::int64_t count = 1;
      for (auto s : shape) {
        if (s < 0) throw FormatError("checkpoint tensor '" + name + "' has a negative dimension");
        count *= s;
      }
      const std::size_t begin = payload_start + offset;
      if (begin + static_cast<std::size_t>(count) * 4 > bytes.size()) {
        throw FormatError("checkpoint truncated in tensor '" + name + "'");
      }
      torch::Tensor t = torch::empty(shape, torch::kFloat32);
      float* data = t.data_ptr<float>();
      for (std::int64_t i = 0; i < count; ++i) data[i] = io::get_f32(bytes.data() + begin + 4 * i);
      ck.tensors.emplace(name, std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint manifest: ") + e.what());
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  io::write_file(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(io::read_file(path));
}

TrainConfig checkpoint_config(const Checkpoint& checkpoint) { return train_config_from_json(checkpoint.config); }

void require_compatible(const Checkpoint& checkpoint, const TrainConfig& config, CompatScope scope) {
  const TrainConfig stored = checkpoint_config(checkpoint);
  if (scope == CompatScope::kFull) {
    if (architecture_hash(stored) != architecture_hash(config)) {
      throw VersionError("checkpoint architecture " + architecture_json(stored).dump() +
                         " does not match config " + architecture_json(config).dump());
    }
    return;
  }
  const bool same = stored.image_height == config.image_height && stored.image_width == config.image_width &&
                    stored.n_parts == config.n_parts && stored.uv_base_width == config.uv_base_width &&
                    stored.uv_res_blocks == config.uv_res_blocks && stored.n_down == config.n_down;
  if (!same) throw VersionError("pretrained UV generator does not match the configured architecture");
}

void export_module(const std::string& prefix, const torch::nn::Module& module,
                   std::map<std::string, torch::Tensor>& out) {
  for (const auto& item : module.named_parameters()) out[prefix + "/" + item.key()] = as_payload(item.value());
  for (const auto& item : module.named_buffers()) out[prefix + "/" + item.key()] = as_payload(item.value());
}

void import_module(const std::string& prefix, torch::nn::Module& module,
                   const std::map<std::string, torch::Tensor>& tensors) {
  for (auto& item : module.named_parameters()) {
    const std::string name = prefix + "/" + item.key();
    copy_into(item.value(), find_tensor(tensors, name), name);
  }
  for (auto& item : module.named_buffers()) {
    const std::string name = prefix + "/" + item.key();
    copy_into(item.value(), find_tensor(tensors, name), name);
  }
}

void export_adam(const std::string& prefix, torch::optim::Adam& optimizer, const NamedParams& params,
                 std::map<std::string, torch::Tensor>& out) {
  auto& state = optimizer.state();
  for (const auto& [name, p] : params) {
    auto it = state.find(p.unsafeGetTensorImpl());
    if (it == state.end()) continue;
    auto& s = static_cast<torch::optim::AdamParamState&>(*it->second);
    out[prefix + "/" + name + "/exp_avg"] = as_payload(s.exp_avg());
    out[prefix + "/" + name + "/exp_avg_sq"] = as_payload(s.exp_avg_sq());
    out[prefix + "/" + name + "/step"] = torch::tensor({static_cast<float>(s.step())});
  }
}

void import_adam(const std::string& prefix, torch::optim::Adam& optimizer, const NamedParams& params,
                 const std::map<std::string, torch::Tensor>& tensors) {
  auto& state = optimizer.state();
  for (const auto& [name, p] : params) {
    const std::string base = prefix + "/" + name;
    auto step_it = tensors.find(base + "/step");
    if (step_it == tensors.end()) {
      state.erase(p.unsafeGetTensorImpl());
      continue;
    }
    auto s = std::make_unique<torch::optim::AdamParamState>();
    s->step(static_cast<std::int64_t>(step_it->second.item<float>()));
    torch::Tensor avg = torch::zeros_like(p);
    torch::Tensor avg_sq = torch::zeros_like(p);
    copy_into(avg, find_tensor(tensors, base + "/exp_avg"), base + "/exp_avg");
    copy_into(avg_sq, find_tensor(tensors, base + "/exp_avg_sq"), base + "/exp_avg_sq");
    s->exp_avg(avg);
    s->exp_avg_sq(avg_sq);
    state[p.unsafeGetTensorImpl()] = std::move(s);
  }
}

}  // namespace nvr
