#include "nvr/skeleton.hpp"

#include "nvr/errors.hpp"
#include "nvr/io.hpp"

namespace nvr {

void Skeleton::validate() const {
  const std::size_t n = bones.size();
  if (n == 0) throw SchemaError("skeleton has no bones");
  if (palette.size() != n || radius.size() != n || depth.size() != n) {
    throw SchemaError("skeleton palette/radius/depth lengths must equal the bone count");
  }
  for (const auto& b : bones) {
    if (b[0] < 0 || b[1] < 0 || b[0] >= n_joints || b[1] >= n_joints) {
      throw SchemaError("skeleton bone references joint outside [0, n_joints)");
    }
  }
}

nlohmann::json skeleton_to_json(const Skeleton& s) {
  return nlohmann::json{{"n_joints", s.n_joints},
                        {"bones", s.bones},
                        {"palette", s.palette},
                        {"radius", s.radius},
                        {"depth", s.depth}};
}

Skeleton skeleton_from_json(const nlohmann::json& j) {
  Skeleton s;
  try {
    s.n_joints = j.at("n_joints").get<int>();
    s.bones = j.at("bones").get<std::vector<std::array<int, 2>>>();
    s.palette = j.at("palette").get<std::vector<std::array<float, 3>>>();
    s.radius = j.at("radius").get<std::vector<double>>();
    s.depth = j.at("depth").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("skeleton.json: ") + e.what());
  }
  s.validate();
  return s;
}

void save_skeleton(const std::filesystem::path& path, const Skeleton& skeleton) {
  io::write_file(path, skeleton_to_json(skeleton).dump(2));
}

Skeleton load_skeleton(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return skeleton_from_json(j);
}

}  // namespace nvr
