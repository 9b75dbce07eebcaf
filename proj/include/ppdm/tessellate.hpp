#pragma once

#include <array>
#include <string>
#include <vector>

#include "ppdm/brep.hpp"

namespace ppdm {

struct TriangleMesh {
  std::vector<Point3> positions;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> face_ids;  // per triangle
  std::vector<std::string> face_tags;  // per triangle
  std::vector<Vec3> normals;  // per triangle, outward
  std::vector<std::string> warnings;
};

/// Ear-clipping triangulation of every face on its plane. Zero-area faces
/// are skipped with a warning entry.
TriangleMesh tessellate(const Body& body);

double meshVolume(const TriangleMesh& mesh);

std::string toObj(const TriangleMesh& mesh);
std::string toStl(const TriangleMesh& mesh, const std::string& name = "ppdm");

}  // namespace ppdm
