#pragma once

// ASCII mesh, point and trajectory files.
//
//   OFF / OBJ   triangles only; OBJ "f" entries may carry /vt/vn suffixes
//   XYZ         one "x y z" triple per line, '#' starts a comment
//   manifest    JSON: {"topology": "ref.off", "frames": [{"file": "...", "t": 0.0}, ...]}
//               "topology" may be omitted when the first frame is OFF/OBJ.
//               Relative paths resolve against the manifest's directory.

#include <filesystem>
#include <vector>

#include "memlme/mesh.hpp"

namespace memlme {

TriMesh load_mesh(const std::filesystem::path& path);
void save_off(const TriMesh& mesh, const std::filesystem::path& path);

std::vector<Vec3> load_points(const std::filesystem::path& path);
void save_points(std::span<const Vec3> points, const std::filesystem::path& path);

Trajectory load_trajectory(const std::filesystem::path& manifest);
// Writes one OFF file per frame next to the manifest.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& manifest);

}  // namespace memlme
