#include "nvr/keypoints.hpp"

#include <cmath>

#include "json.hpp"
#include "nvr/errors.hpp"
#include "nvr/io.hpp"

namespace nvr {

void save_keypoints(const std::filesystem::path& path, const std::vector<KeypointSet>& sequence) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& kps : sequence) j.push_back(kps.points);
  io::write_file(path, j.dump());
}

std::vector<KeypointSet> load_keypoints(const std::filesystem::path& path) {
  std::vector<KeypointSet> out;
  try {
    const auto j = nlohmann::json::parse(io::read_file(path));
    for (const auto& frame : j) {
      KeypointSet kps(frame.get<std::vector<std::array<double, 2>>>());
      for (const auto& p : kps.points) {
        if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw DataError(path.string() + ": non-finite keypoint");
      }
      out.push_back(std::move(kps));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!out.empty()) {
    const int j0 = out.front().size();
    for (const auto& k : out) {
      if (k.size() != j0) throw SchemaError(path.string() + ": joint count varies between frames");
    }
  }
  return out;
}

}  // namespace nvr
